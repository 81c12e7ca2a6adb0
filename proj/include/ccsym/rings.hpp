#ifndef CCSYM_RINGS_HPP
#define CCSYM_RINGS_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "ccsym/errors.hpp"

namespace ccsym {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

enum class BaseKind { rationals, integers_mod };

struct NilGenerator {
	std::string name;
	int order = 2; // name^order = 0
	bool operator==(const NilGenerator &) const = default;
};

/// Coefficient ring = base (Q or Z/m, m a prime power) extended by finitely
/// many nilpotent generators with prescribed vanishing orders.
struct RingDescriptor {
	BaseKind base = BaseKind::rationals;
	Int modulus = 0;
	std::vector<NilGenerator> generators;
	bool operator==(const RingDescriptor &) const = default;
};

namespace detail {

inline std::pair<Int, int> prime_power_split(const Int &m)
{
	Int n = m;
	for (Int p = 2; p * p <= n; ++p)
		if (n % p == 0)
		{
			int k = 0;
			while (n % p == 0)
			{
				n /= p;
				++k;
			}
			if (n != 1)
				return {0, 0};
			return {p, k};
		}
	return {n, 1};
}

struct RingData {
	RingDescriptor desc;
	Int prime = 0;  // for integers_mod
	int prime_exp = 0;
	int nil_index = 1; // least e with Nil(A)^e = 0
};

} // namespace detail

/// Immutable shared handle to a coefficient ring.
class Ring {
	std::shared_ptr<const detail::RingData> d_;

public:
	Ring() = default;

	explicit Ring(const RingDescriptor &desc)
	{
		auto data = std::make_shared<detail::RingData>();
		data->desc = desc;
		if (desc.base == BaseKind::integers_mod)
		{
			if (desc.modulus < 2)
				throw descriptor_error("modulus must be >= 2");
			auto [p, k] = detail::prime_power_split(desc.modulus);
			if (p == 0)
				throw descriptor_error(
				    "modulus must be a prime power (rings with nontrivial "
				    "idempotents are not supported)");
			data->prime = p;
			data->prime_exp = k;
		}
		int nil = desc.base == BaseKind::integers_mod ? data->prime_exp : 1;
		for (std::size_t i = 0; i < desc.generators.size(); ++i)
		{
			const auto &g = desc.generators[i];
			if (g.order < 2)
				throw descriptor_error("generator order must be >= 2: " + g.name);
			if (g.name.empty() || g.name == "t")
				throw descriptor_error("invalid generator name: '" + g.name + "'");
			for (std::size_t j = 0; j < i; ++j)
				if (desc.generators[j].name == g.name)
					throw descriptor_error("duplicate generator name: " + g.name);
			nil += g.order - 1;
		}
		data->nil_index = nil;
		d_ = std::move(data);
	}

	const RingDescriptor &descriptor() const { return d_->desc; }
	bool is_q_algebra() const { return d_->desc.base == BaseKind::rationals; }
	const Int &modulus() const { return d_->desc.modulus; }
	int generator_count() const { return (int)d_->desc.generators.size(); }
	const NilGenerator &generator(int i) const { return d_->desc.generators[i]; }

	/// Least e with Nil(A)^e = 0. For a reduced base this is 1.
	int nil_index() const { return d_->nil_index; }

	int generator_index(const std::string &name) const
	{
		for (int i = 0; i < generator_count(); ++i)
			if (d_->desc.generators[i].name == name)
				return i;
		return -1;
	}

	bool same(const Ring &o) const
	{
		return d_ == o.d_ || (d_ && o.d_ && d_->desc == o.d_->desc);
	}

	// -- base scalar arithmetic ------------------------------------------
	// Scalars are stored as exact rationals. Over Z/m the canonical form is
	// the residue in [0, m) with denominator 1; a fraction a/b is accepted
	// whenever b is invertible mod m.

	Rat base_canon(const Rat &x) const
	{
		if (is_q_algebra())
			return x;
		Int num = numerator(x), den = denominator(x);
		const Int &m = modulus();
		if (den != 1)
		{
			if (gcd(den % m, m) != 1)
				throw not_a_unit_error("denominator not invertible mod " + m.str());
			num *= base_inv_int(den % m);
		}
		num %= m;
		if (num < 0)
			num += m;
		return Rat(num);
	}

	bool base_is_zero(const Rat &x) const { return x == 0; }

	bool base_is_unit(const Rat &x) const
	{
		if (is_q_algebra())
			return x != 0;
		return gcd(numerator(x), modulus()) == 1;
	}

	bool base_is_nilpotent(const Rat &x) const
	{
		if (is_q_algebra())
			return x == 0;
		return numerator(x) % d_->prime == 0;
	}

	Rat base_inv(const Rat &x) const
	{
		if (is_q_algebra())
		{
			if (x == 0)
				throw not_a_unit_error("division by zero");
			return 1 / x;
		}
		if (!base_is_unit(x))
			throw not_a_unit_error("not a unit mod " + modulus().str() +
			                       " (gcd with modulus is not 1): " + x.str());
		return Rat(base_inv_int(numerator(x)));
	}

	/// Least e >= 1 with x^e = 0, or nullopt when x is not nilpotent.
	std::optional<int> base_nil_order(const Rat &x) const
	{
		if (x == 0)
			return 1;
		if (is_q_algebra())
			return std::nullopt;
		Int n = numerator(x) % modulus();
		if (n % d_->prime != 0)
			return std::nullopt;
		int v = 0;
		while (n % d_->prime == 0)
		{
			n /= d_->prime;
			++v;
		}
		return (d_->prime_exp + v - 1) / v;
	}

private:
	Int base_inv_int(Int a) const
	{
		// extended gcd; valid since gcd(a, m) = 1
		const Int &m = modulus();
		Int r0 = m, r1 = ((a % m) + m) % m, s0 = 0, s1 = 1;
		while (r1 != 0)
		{
			Int q = r0 / r1;
			Int r2 = r0 - q * r1;
			Int s2 = s0 - q * s1;
			r0 = r1;
			r1 = r2;
			s0 = s1;
			s1 = s2;
		}
		if (r0 != 1)
			throw internal_error("base_inv_int on non-unit");
		s0 %= m;
		if (s0 < 0)
			s0 += m;
		return s0;
	}
};

inline Ring make_ring(const RingDescriptor &desc) { return Ring(desc); }

/// Exponent vector, one entry per nilpotent generator of the ring.
using Mono = std::vector<std::uint32_t>;

/// Exact element of a coefficient ring: canonical sparse map from monomials
/// in the nilpotent generators to base scalars. No zero coefficients are
/// stored, so equality is structural.
class RingElem {
	Ring ring_;
	std::map<Mono, Rat> c_;

public:
	RingElem() = default;

	explicit RingElem(Ring r) : ring_(std::move(r)) {}

	RingElem(Ring r, const Rat &constant) : ring_(std::move(r))
	{
		Rat v = ring_.base_canon(constant);
		if (!ring_.base_is_zero(v))
			c_.emplace(Mono(ring_.generator_count(), 0), std::move(v));
	}

	static RingElem zero(const Ring &r) { return RingElem(r); }
	static RingElem one(const Ring &r) { return RingElem(r, 1); }

	static RingElem generator(const Ring &r, int i)
	{
		RingElem e(r);
		Mono m(r.generator_count(), 0);
		m[i] = 1;
		e.c_.emplace(std::move(m), Rat(1));
		return e;
	}

	static RingElem monomial(const Ring &r, Mono m, const Rat &coeff)
	{
		RingElem e(r);
		for (int i = 0; i < r.generator_count(); ++i)
			if ((int)m[i] >= r.generator(i).order)
				return e;
		Rat v = r.base_canon(coeff);
		if (!r.base_is_zero(v))
			e.c_.emplace(std::move(m), std::move(v));
		return e;
	}

	const Ring &ring() const { return ring_; }
	const std::map<Mono, Rat> &coefficients() const { return c_; }
	bool is_zero() const { return c_.empty(); }

	/// Coefficient of the all-zero exponent vector.
	Rat constant_part() const
	{
		Mono z(ring_.generator_count(), 0);
		auto it = c_.find(z);
		return it == c_.end() ? Rat(0) : it->second;
	}

	bool is_one() const
	{
		return c_.size() == 1 && c_.begin()->second == 1 &&
		       std::all_of(c_.begin()->first.begin(), c_.begin()->first.end(),
		                   [](std::uint32_t e) { return e == 0; });
	}

	bool operator==(const RingElem &o) const
	{
		return ring_.same(o.ring_) && c_ == o.c_;
	}
	bool operator!=(const RingElem &o) const { return !(*this == o); }

	friend RingElem operator+(const RingElem &a, const RingElem &b)
	{
		a.check_ring(b);
		RingElem r = a;
		for (const auto &[m, v] : b.c_)
			r.add_term(m, v);
		return r;
	}

	friend RingElem operator-(const RingElem &a, const RingElem &b)
	{
		a.check_ring(b);
		RingElem r = a;
		for (const auto &[m, v] : b.c_)
			r.add_term(m, -v);
		return r;
	}

	RingElem operator-() const
	{
		RingElem r(ring_);
		for (const auto &[m, v] : c_)
			r.c_.emplace(m, ring_.base_canon(-v));
		return r;
	}

	friend RingElem operator*(const RingElem &a, const RingElem &b)
	{
		a.check_ring(b);
		RingElem r(a.ring_);
		const int n = a.ring_.generator_count();
		for (const auto &[ma, va] : a.c_)
			for (const auto &[mb, vb] : b.c_)
			{
				Mono m(n);
				bool dead = false;
				for (int i = 0; i < n; ++i)
				{
					m[i] = ma[i] + mb[i];
					if ((int)m[i] >= a.ring_.generator(i).order)
					{
						dead = true;
						break;
					}
				}
				if (!dead)
					r.add_term(m, va * vb);
			}
		return r;
	}

	RingElem &operator+=(const RingElem &o) { return *this = *this + o; }
	RingElem &operator-=(const RingElem &o) { return *this = *this - o; }
	RingElem &operator*=(const RingElem &o) { return *this = *this * o; }

	/// Multiply every coefficient by an exact base scalar.
	RingElem scaled(const Rat &s) const
	{
		RingElem r(ring_);
		for (const auto &[m, v] : c_)
		{
			Rat w = ring_.base_canon(v * s);
			if (!ring_.base_is_zero(w))
				r.c_.emplace(m, std::move(w));
		}
		return r;
	}

	/// Units are exactly the elements whose constant part is a base unit.
	bool is_unit() const { return ring_.base_is_unit(constant_part()); }

	bool is_nilpotent() const
	{
		return ring_.base_is_nilpotent(constant_part());
	}

	/// Exact inverse via finite geometric expansion in the nilpotent part.
	RingElem inv() const
	{
		Rat c = constant_part();
		if (!ring_.base_is_unit(c))
			throw not_a_unit_error("constant part is not a unit of the base: " +
			                       to_string());
		Rat ci = ring_.base_inv(c);
		RingElem n = *this - RingElem(ring_, c); // nilpotent part
		RingElem z = (-n).scaled(ci);            // z = -c^{-1} n
		RingElem acc = one(ring_);
		RingElem pw = one(ring_);
		for (int k = 0; !z.is_zero() && k <= ring_.nil_index(); ++k)
		{
			pw = pw * z;
			if (pw.is_zero())
				break;
			acc += pw;
			if (k == ring_.nil_index())
				throw internal_error("geometric inverse did not terminate");
		}
		return acc.scaled(ci);
	}

	RingElem pow(long long e) const
	{
		if (e < 0)
			return inv().pow(-e);
		RingElem r = one(ring_);
		RingElem b = *this;
		while (e > 0)
		{
			if (e & 1)
				r = r * b;
			b = b * b;
			e >>= 1;
		}
		return r;
	}

	/// Least e >= 1 with x^e = 0, or nullopt when x is not nilpotent.
	std::optional<int> nilpotency_order() const
	{
		if (!is_nilpotent())
			return std::nullopt;
		RingElem p = *this;
		int e = 1;
		while (!p.is_zero())
		{
			p = p * *this;
			++e;
			if (e > ring_.nil_index() + 1)
				throw internal_error("nilpotency_order exceeded nil_index");
		}
		return e;
	}

	std::string to_string() const
	{
		if (c_.empty())
			return "0";
		std::ostringstream out;
		bool first = true;
		for (const auto &[m, v] : c_)
		{
			Rat coeff = v;
			if (first)
			{
				if (coeff < 0 && ring_.is_q_algebra())
				{
					out << "-";
					coeff = -coeff;
				}
			}
			else
			{
				if (coeff < 0 && ring_.is_q_algebra())
				{
					out << " - ";
					coeff = -coeff;
				}
				else
					out << " + ";
			}
			bool has_mono =
			    std::any_of(m.begin(), m.end(), [](std::uint32_t e) { return e != 0; });
			if (!has_mono)
				out << coeff;
			else
			{
				bool printed = false;
				if (coeff != 1)
				{
					out << coeff;
					printed = true;
				}
				for (int i = 0; i < ring_.generator_count(); ++i)
					if (m[i] != 0)
					{
						if (printed)
							out << "*";
						out << ring_.generator(i).name;
						if (m[i] > 1)
							out << "^" << m[i];
						printed = true;
					}
			}
			first = false;
		}
		return out.str();
	}

	friend std::ostream &operator<<(std::ostream &os, const RingElem &e)
	{
		return os << e.to_string();
	}

	/// Image under the natural quotient map onto `target`: generators missing
	/// from the target map to 0, exponents at or above the target order die,
	/// and a modular base reduces mod the smaller modulus.
	RingElem project_to(const Ring &target) const
	{
		const RingDescriptor &s = ring_.descriptor();
		const RingDescriptor &t = target.descriptor();
		if (s.base != t.base)
			throw domain_error("projection requires the same base kind");
		if (s.base == BaseKind::integers_mod && s.modulus % t.modulus != 0)
			throw domain_error("projection requires the target modulus to divide "
			                   "the source modulus");
		RingElem r(target);
		for (const auto &[m, v] : c_)
		{
			Mono tm(target.generator_count(), 0);
			bool dead = false;
			for (int i = 0; i < ring_.generator_count() && !dead; ++i)
			{
				if (m[i] == 0)
					continue;
				int j = target.generator_index(ring_.generator(i).name);
				if (j < 0 || (int)m[i] >= target.generator(j).order)
					dead = true;
				else
					tm[j] = m[i];
			}
			if (!dead)
				r.add_term(tm, v);
		}
		return r;
	}

private:
	void check_ring(const RingElem &o) const
	{
		if (!ring_.same(o.ring_))
			throw internal_error("mixed-ring arithmetic");
	}

	void add_term(const Mono &m, const Rat &v)
	{
		auto it = c_.find(m);
		if (it == c_.end())
		{
			Rat w = ring_.base_canon(v);
			if (!ring_.base_is_zero(w))
				c_.emplace(m, std::move(w));
		}
		else
		{
			it->second = ring_.base_canon(it->second + v);
			if (ring_.base_is_zero(it->second))
				c_.erase(it);
		}
	}
};

/// Exp of a nilpotent element as the finite sum of its exponential series.
/// Requires a Q-algebra (the sum divides by factorials).
inline RingElem exp_nilpotent(const RingElem &x)
{
	if (!x.ring().is_q_algebra())
		throw domain_error("exp requires a Q-algebra base");
	if (!x.is_nilpotent())
		throw domain_error("exp requires a nilpotent argument");
	RingElem acc = RingElem::one(x.ring());
	RingElem pw = RingElem::one(x.ring());
	Rat fact = 1;
	for (int k = 1; k <= x.ring().nil_index() + 1; ++k)
	{
		pw = pw * x;
		if (pw.is_zero())
			return acc;
		fact *= k;
		acc += pw.scaled(1 / fact);
	}
	throw internal_error("exp_nilpotent did not terminate");
}

// -- deterministic sampling ---------------------------------------------
// A small fixed-sequence generator (splitmix64) so property suites are
// reproducible across platforms; the standard distributions are not.

class Rng {
	std::uint64_t state_;

public:
	explicit Rng(std::uint64_t seed) : state_(seed) {}

	std::uint64_t next()
	{
		std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
		z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
		z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
		return z ^ (z >> 31);
	}

	std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

	long long range(long long lo, long long hi) // inclusive
	{
		return lo + (long long)below((std::uint64_t)(hi - lo + 1));
	}

	bool chance(int percent) { return (int)below(100) < percent; }
};

struct ElemSamplerConfig {
	int height = 5;          // coefficient magnitude bound
	int nil_density = 50;    // percent chance a nilpotent monomial appears
	bool use_fractions = false;
};

namespace detail {
inline void all_monomials(const Ring &r, int i, Mono &cur, std::vector<Mono> &out)
{
	if (i == r.generator_count())
	{
		out.push_back(cur);
		return;
	}
	for (int e = 0; e < r.generator(i).order; ++e)
	{
		cur[i] = e;
		all_monomials(r, i + 1, cur, out);
	}
	cur[i] = 0;
}
} // namespace detail

inline std::vector<Mono> all_monomials(const Ring &r)
{
	std::vector<Mono> out;
	Mono cur(r.generator_count(), 0);
	detail::all_monomials(r, 0, cur, out);
	return out;
}

inline Rat sample_base_scalar(const Ring &r, Rng &rng, const ElemSamplerConfig &cfg)
{
	if (r.is_q_algebra())
	{
		Rat num(rng.range(-cfg.height, cfg.height));
		if (cfg.use_fractions && rng.chance(30))
			return num / Rat(rng.range(1, cfg.height));
		return num;
	}
	return Rat(rng.below(10 * cfg.height) % (std::uint64_t)r.modulus());
}

inline RingElem sample_elem(const Ring &r, Rng &rng,
                            const ElemSamplerConfig &cfg = {})
{
	RingElem e(r, sample_base_scalar(r, rng, cfg));
	for (const auto &m : all_monomials(r))
	{
		bool constant = std::all_of(m.begin(), m.end(),
		                            [](std::uint32_t x) { return x == 0; });
		if (constant || !rng.chance(cfg.nil_density))
			continue;
		e += RingElem::monomial(r, m, sample_base_scalar(r, rng, cfg));
	}
	return e;
}

inline RingElem sample_unit(const Ring &r, Rng &rng,
                            const ElemSamplerConfig &cfg = {})
{
	RingElem e = sample_elem(r, rng, cfg);
	for (int tries = 0; !e.is_unit(); ++tries)
	{
		if (tries > 200)
			throw internal_error("sample_unit failed to find a unit");
		e += RingElem::one(r).scaled(Rat(rng.range(1, std::max(1, cfg.height))));
	}
	return e;
}

inline RingElem sample_nilpotent(const Ring &r, Rng &rng,
                                 const ElemSamplerConfig &cfg = {})
{
	RingElem e = sample_elem(r, rng, cfg);
	Rat c = e.constant_part();
	if (r.is_q_algebra())
		return e - RingElem(r, c);
	// force the constant part into the nilradical of Z/p^k
	RingElem adjusted = e - RingElem(r, c);
	Int p = 2;
	{
		auto [pp, k] = detail::prime_power_split(r.modulus());
		p = pp;
	}
	return adjusted + RingElem(r, Rat(p) * Rat(rng.below(10)));
}

} // namespace ccsym

#endif
