#ifndef CCSYM_SERIES_HPP
#define CCSYM_SERIES_HPP

#include <initializer_list>
#include <limits>
#include <map>
#include <utility>
#include <vector>

#include "ccsym/rings.hpp"

namespace ccsym {

/// Sentinel precision: every coefficient not stored is exactly zero.
inline constexpr int kExactPrec = std::numeric_limits<int>::max();

namespace detail {
inline int sat_add(int a, int b)
{
	if (a == kExactPrec || b == kExactPrec)
		return kExactPrec;
	long long s = (long long)a + (long long)b;
	if (s >= kExactPrec)
		return kExactPrec - 1;
	if (s <= std::numeric_limits<int>::min() + 1)
		return std::numeric_limits<int>::min() + 1;
	return (int)s;
}
} // namespace detail

/// Laurent series over a coefficient ring. Coefficients are stored sparsely
/// for indices below `precision()`; an exact series has every omitted
/// coefficient equal to zero. Every stored coefficient is the true one: the
/// precision bound only says where knowledge stops, never that stored values
/// are approximate.
class Series {
	Ring ring_;
	std::map<int, RingElem> c_;
	int prec_ = kExactPrec;

public:
	Series() = default;
	explicit Series(Ring r) : ring_(std::move(r)) {}

	static Series zero(const Ring &r) { return Series(r); }

	static Series constant(const Ring &r, const RingElem &v)
	{
		return monomial(r, v, 0);
	}

	static Series one(const Ring &r) { return constant(r, RingElem::one(r)); }

	static Series monomial(const Ring &r, const RingElem &v, int k)
	{
		Series s(r);
		if (!v.is_zero())
			s.c_.emplace(k, v);
		return s;
	}

	static Series t(const Ring &r)
	{
		return monomial(r, RingElem::one(r), 1);
	}

	static Series from_terms(const Ring &r,
	                         std::initializer_list<std::pair<int, RingElem>> terms,
	                         int prec = kExactPrec)
	{
		Series s(r);
		s.prec_ = prec;
		for (const auto &[k, v] : terms)
			s.add_term(k, v);
		return s;
	}

	const Ring &ring() const { return ring_; }
	const std::map<int, RingElem> &terms() const { return c_; }
	int precision() const { return prec_; }
	bool is_exact() const { return prec_ == kExactPrec; }
	bool is_zero() const { return c_.empty(); }

	/// Index of the lowest stored coefficient; the canonical zero series
	/// reports its precision bound.
	int lowest() const { return c_.empty() ? prec_ : c_.begin()->first; }

	int top_stored() const
	{
		return c_.empty() ? std::numeric_limits<int>::min() : c_.rbegin()->first;
	}

	/// max(0, -lowest): how far the series reaches below degree zero.
	int principal_depth() const
	{
		if (c_.empty() || c_.begin()->first >= 0)
			return 0;
		return -c_.begin()->first;
	}

	bool coeff_known(int i) const { return i < prec_; }

	RingElem coeff(int i) const
	{
		if (!coeff_known(i))
			throw precision_error("coefficient of t^" + std::to_string(i) +
			                      " is beyond the known precision");
		auto it = c_.find(i);
		return it == c_.end() ? RingElem::zero(ring_) : it->second;
	}

	bool operator==(const Series &o) const
	{
		return ring_.same(o.ring_) && prec_ == o.prec_ && c_ == o.c_;
	}
	bool operator!=(const Series &o) const { return !(*this == o); }

	/// The exact Laurent polynomial spanned by the stored coefficients,
	/// forgetting the precision bound. Only meaningful where the caller can
	/// argue the tail does not matter.
	Series exact_polynomial() const
	{
		Series s(ring_);
		s.c_ = c_;
		return s;
	}

	Series truncated(int p) const
	{
		if (p >= prec_)
			return *this;
		Series s(ring_);
		s.prec_ = p;
		for (const auto &[k, v] : c_)
		{
			if (k >= p)
				break;
			s.c_.emplace(k, v);
		}
		return s;
	}

	friend Series operator+(const Series &a, const Series &b)
	{
		a.check_ring(b);
		Series s(a.ring_);
		s.prec_ = std::min(a.prec_, b.prec_);
		for (const auto &[k, v] : a.c_)
			s.add_term(k, v);
		for (const auto &[k, v] : b.c_)
			s.add_term(k, v);
		return s;
	}

	friend Series operator-(const Series &a, const Series &b) { return a + (-b); }

	Series operator-() const
	{
		Series s(ring_);
		s.prec_ = prec_;
		for (const auto &[k, v] : c_)
			s.c_.emplace(k, -v);
		return s;
	}

	Series &operator+=(const Series &o) { return *this = *this + o; }
	Series &operator-=(const Series &o) { return *this = *this - o; }
	Series &operator*=(const Series &o) { return *this = *this * o; }

	friend Series operator*(const Series &a, const Series &b)
	{
		a.check_ring(b);
		Series s(a.ring_);
		s.prec_ = mul_precision(a, b);
		for (const auto &[i, va] : a.c_)
			for (const auto &[j, vb] : b.c_)
			{
				if (s.prec_ != kExactPrec && i + j >= s.prec_)
					continue;
				s.add_term(i + j, va * vb);
			}
		return s;
	}

	Series scaled(const RingElem &x) const
	{
		Series s(ring_);
		s.prec_ = prec_;
		for (const auto &[k, v] : c_)
			s.add_term(k, v * x);
		return s;
	}

	/// Multiplication by t^k.
	Series shifted(int k) const
	{
		Series s(ring_);
		s.prec_ = detail::sat_add(prec_, k);
		for (const auto &[i, v] : c_)
			s.c_.emplace(i + k, v);
		return s;
	}

	/// Termwise formal derivative.
	Series derivative() const
	{
		Series s(ring_);
		s.prec_ = prec_ == kExactPrec ? kExactPrec : prec_ - 1;
		for (const auto &[k, v] : c_)
		{
			if (k == 0)
				continue;
			s.add_term(k - 1, v.scaled(Rat(k)));
		}
		return s;
	}

	std::string to_string() const
	{
		if (c_.empty())
			return "0";
		std::ostringstream out;
		bool first = true;
		for (const auto &[k, v] : c_)
		{
			std::string cs = v.to_string();
			bool compound = v.coefficients().size() > 1;
			bool negated = false;
			if (!first && !compound && cs.size() > 1 && cs[0] == '-')
			{
				out << " - ";
				cs = cs.substr(1);
				negated = true;
			}
			else if (!first)
				out << " + ";
			if (k == 0)
			{
				out << (compound ? "(" + cs + ")" : cs);
				first = false;
				continue;
			}
			if (cs == "1" && !compound)
				; // bare t^k
			else if (cs == "-1" && !compound && !negated)
				out << "-";
			else
				out << (compound ? "(" + cs + ")" : cs) << "*";
			out << "t";
			if (k != 1)
				out << "^" << k;
			first = false;
		}
		return out.str();
	}

	friend std::ostream &operator<<(std::ostream &os, const Series &s)
	{
		os << s.to_string();
		if (!s.is_exact())
			os << " + O(t^" << s.prec_ << ")";
		return os;
	}

	Series project_to(const Ring &target) const
	{
		Series s(target);
		s.prec_ = prec_;
		for (const auto &[k, v] : c_)
			s.add_term(k, v.project_to(target));
		return s;
	}

private:
	void check_ring(const Series &o) const
	{
		if (!ring_.same(o.ring_))
			throw internal_error("mixed-ring series arithmetic");
	}

	static int mul_precision(const Series &a, const Series &b)
	{
		if (a.c_.empty() && a.prec_ == kExactPrec)
			return kExactPrec; // exact zero annihilates
		if (b.c_.empty() && b.prec_ == kExactPrec)
			return kExactPrec;
		int n1 = a.prec_ == kExactPrec ? kExactPrec
		                               : detail::sat_add(a.prec_, b.lowest());
		int n2 = b.prec_ == kExactPrec ? kExactPrec
		                               : detail::sat_add(b.prec_, a.lowest());
		return std::min(n1, n2);
	}

	void add_term(int k, const RingElem &v)
	{
		if (prec_ != kExactPrec && k >= prec_)
			return;
		if (v.is_zero())
			return;
		auto it = c_.find(k);
		if (it == c_.end())
			c_.emplace(k, v);
		else
		{
			it->second += v;
			if (it->second.is_zero())
				c_.erase(it);
		}
	}
};

/// True when the series agree coefficientwise below `bound` (defaults to the
/// common precision). Use for comparing results computed at different
/// working precisions.
inline bool agree_below(const Series &a, const Series &b,
                        int bound = kExactPrec)
{
	int p = std::min({a.precision(), b.precision(), bound});
	for (const auto &[k, v] : a.terms())
		if (k < p && !(b.coeff(k) == v))
			return false;
	for (const auto &[k, v] : b.terms())
		if (k < p && !(a.coeff(k) == v))
			return false;
	return true;
}

/// Depth bound for the multiplicative/compositional closure generated by a
/// unit whose coefficients reach `rel_depth` below its unit order: any value
/// of unit order n in that closure has coefficients only at indices
/// >= n - (K-1) * rel_depth, because a coefficient r below the order carries
/// at least ceil(r / rel_depth) nilpotent factors and the nilradical dies at
/// power K.
inline int closure_depth_bound(const Ring &r, int rel_depth)
{
	return (r.nil_index() - 1) * std::max(0, rel_depth);
}

/// Substitution shape test: negative and constant coefficients nilpotent,
/// coefficient of t a unit. Needs the coefficient of t to be known.
inline bool is_substitutable(const Series &g, std::string *why = nullptr)
{
	if (!g.coeff_known(1))
		throw precision_error("substitution series must be known past degree 1");
	for (const auto &[k, v] : g.terms())
	{
		if (k >= 1)
			break;
		if (!v.is_nilpotent())
		{
			if (why)
				*why = "coefficient of t^" + std::to_string(k) + " is not nilpotent";
			return false;
		}
	}
	if (!g.coeff(1).is_unit())
	{
		if (why)
			*why = "coefficient of t^1 is not a unit";
		return false;
	}
	return true;
}

/// Membership in the sharp subgroup: constant coefficient in 1 + Nil(A),
/// negative coefficients nilpotent.
inline bool is_sharp(const Series &f)
{
	if (!f.coeff_known(1))
		throw precision_error("sharp test needs the constant coefficient");
	if (!(f.coeff(0) - RingElem::one(f.ring())).is_nilpotent())
		return false;
	for (const auto &[k, v] : f.terms())
	{
		if (k >= 0)
			break;
		if (!v.is_nilpotent())
			return false;
	}
	return true;
}

/// Order of a unit of A((t)): the index carrying an invertible coefficient,
/// all lower coefficients nilpotent. Unique over the supported rings.
inline int unit_order(const Series &f)
{
	for (const auto &[k, v] : f.terms())
	{
		if (v.is_unit())
			return k;
		if (!v.is_nilpotent())
			throw internal_error("coefficient neither unit nor nilpotent");
	}
	if (f.is_exact())
		throw not_a_unit_error("series has no invertible coefficient: " +
		                       f.to_string());
	throw precision_error("no invertible coefficient among known terms; "
	                      "increase precision");
}

/// f = prod_{i<0} (1 - a_i t^i) * a0 * t^nu * prod_{i>0} (1 - a_i t^i)
/// with nilpotent a_i for i < 0 and a0 a unit. Positive factors are listed
/// up to the requested index bound.
struct UnitFactorization {
	std::vector<std::pair<int, RingElem>> negative; // ascending index, i < 0
	RingElem a0;
	int nu = 0;
	std::vector<std::pair<int, RingElem>> positive; // ascending index, i > 0
	int positive_limit = 0; // factors known for 0 < i <= positive_limit
};

inline Series reassemble(const UnitFactorization &uf, const Ring &r, int prec)
{
	Series acc = Series::monomial(r, uf.a0, uf.nu);
	for (const auto &[i, a] : uf.negative)
		acc = (acc * (Series::one(r) - Series::monomial(r, a, i))).truncated(prec);
	for (const auto &[i, a] : uf.positive)
		acc = (acc * (Series::one(r) - Series::monomial(r, a, i))).truncated(prec);
	return acc;
}

namespace detail {

/// (1 - a t^i)^{-1} = sum_k a^k t^{ik}. Finite when a is nilpotent (required
/// for i < 0), truncated below `prec` otherwise.
inline Series geometric_inverse(const Ring &r, int i, const RingElem &a,
                                int prec)
{
	Series acc = Series::one(r);
	RingElem pw = a;
	int idx = i;
	int guard = 0;
	while (!pw.is_zero() && (i < 0 || idx < prec))
	{
		acc += Series::monomial(r, pw, idx);
		pw = pw * a;
		idx += i;
		if (++guard > 4 * std::max(prec, 1) + 4 * r.nil_index() + 64)
			throw internal_error("geometric_inverse runaway (non-nilpotent "
			                     "coefficient at negative index?)");
	}
	if (i > 0 && !pw.is_zero())
		acc = acc.truncated(prec);
	return acc;
}

} // namespace detail

/// Unique unit factorization. Strips t^nu, then peels nilpotent negative
/// factors deepest-first (every step pushes the deepest residual into a
/// higher power of the nilradical, so the loop clears one grade layer per
/// sweep and is bounded by the nil index), then peels positive factors
/// triangularly up to `positive_limit`. The computed factors are the true
/// ones; reassembling them reproduces the input below
/// nu + positive_limit + 1 - (negative depth), since omitted factors above
/// the limit cross the negative factors that far down.
inline UnitFactorization unit_decompose(const Series &f, int positive_limit)
{
	const Ring &r = f.ring();
	const int nu = unit_order(f);
	if (positive_limit < 0)
		positive_limit = 0;
	const int rel_prec = positive_limit + 1;
	if (!f.is_exact() && f.precision() - nu < rel_prec)
		throw precision_error("unit_decompose: positive factors up to index " +
		                      std::to_string(positive_limit) +
		                      " reach beyond the known precision");

	UnitFactorization uf;
	uf.nu = nu;
	uf.positive_limit = positive_limit;

	const Series u = f.shifted(-nu);
	const int depth0 = u.principal_depth();
	const int depth_cap = closure_depth_bound(r, depth0) + depth0 + 1;
	const int cap = r.nil_index() * (2 * depth_cap + 4) + 16;

	std::map<int, RingElem> neg;
	Series w = u;
	for (int steps = 0;; ++steps)
	{
		auto it = w.terms().begin();
		if (it == w.terms().end() || it->first >= 0)
			break;
		if (steps > cap)
			throw internal_error("negative factor peeling did not terminate");
		const int i = it->first;
		if (-i > depth_cap)
			throw internal_error("negative factor peeling ran too deep");
		if (!it->second.is_nilpotent())
			throw not_a_unit_error(
			    "coefficient below the unit order is not nilpotent");
		RingElem delta = -(it->second * w.coeff(0).inv());
		auto at = neg.find(i);
		if (at == neg.end())
			neg.emplace(i, delta);
		else
		{
			at->second += delta;
			if (at->second.is_zero())
				neg.erase(at);
		}
		w = u;
		for (const auto &[j, a] : neg)
			w = w * detail::geometric_inverse(r, j, a, rel_prec);
	}
	for (const auto &[i, a] : neg)
		uf.negative.emplace_back(i, a);

	uf.a0 = w.coeff(0);
	if (!uf.a0.is_unit())
		throw internal_error("unit factor lost invertibility during peeling");
	Series v = w.scaled(uf.a0.inv());

	// Triangular: after handling index j the series is 1 mod t^{j+1}.
	for (int j = 1; j <= positive_limit; ++j)
	{
		if (!v.coeff_known(j))
			throw precision_error("unit_decompose: precision exhausted while "
			                      "peeling positive factors");
		RingElem cj = v.coeff(j);
		if (cj.is_zero())
			continue;
		RingElem aj = -cj;
		uf.positive.emplace_back(j, aj);
		v = v * detail::geometric_inverse(r, j, aj, rel_prec);
	}
	if (!(v.coeff(0) - RingElem::one(r)).is_zero())
		throw internal_error("positive factor peeling left a constant residue");
	return uf;
}

/// Multiplicative inverse of a unit of A((t)), correct below `prec`.
inline Series invert_unit(const Series &f, int prec)
{
	const Ring &r = f.ring();
	if (f.terms().size() == 1 && f.is_exact())
	{
		const auto &[k, v] = *f.terms().begin();
		if (v.is_unit())
			return Series::monomial(r, v.inv(), -k);
	}
	const int nu = unit_order(f);
	// Positive factors up to prec+nu would suffice for exact inputs; the band
	// covers precision charged against the negative-depth reach of the result.
	const int band = closure_depth_bound(
	    r, std::max(0, nu - (f.is_zero() ? nu : f.lowest())));
	// factors at index >= prec+nu+band only touch indices the band cannot
	// drag below the requested precision
	const int limit =
	    std::max(0, detail::sat_add(detail::sat_add(prec, nu), band - 1));
	UnitFactorization uf = unit_decompose(f, limit);
	const int rel_prec = limit + 1;
	Series acc = Series::constant(r, uf.a0.inv());
	for (const auto &[i, a] : uf.negative)
		acc = acc * detail::geometric_inverse(r, i, a, rel_prec);
	for (const auto &[i, a] : uf.positive)
		acc = acc * detail::geometric_inverse(r, i, a, rel_prec);
	Series out = acc.shifted(-nu);
	if (!out.is_exact())
	{
		if (out.precision() < prec)
			throw precision_error(
			    "invert_unit: could not reach the requested precision");
		out = out.truncated(prec);
	}
	return out;
}

namespace detail {

/// sum_m coeff(m) * u^m for u nilpotent in degrees <= 0; correct below
/// `prec`. The cutoff follows from the nil grading: u^m has no terms below
/// m - (K-1)(d+1).
template <typename CoeffFn>
Series nilpotent_power_sum(const Series &u, int prec, CoeffFn coeff_of)
{
	const Ring &r = u.ring();
	for (const auto &[k, v] : u.terms())
	{
		if (k > 0)
			break;
		if (!v.is_nilpotent())
			throw domain_error("series argument must be nilpotent in degrees <= 0");
	}
	const int d = u.principal_depth();
	const int band = closure_depth_bound(r, d + 1);
	const int m_max = std::max(1, prec + r.nil_index() * (d + 1));
	const int work = sat_add(prec, band + d + 2);
	Series acc = Series::zero(r);
	Series pw = Series::one(r);
	bool converged = false;
	for (int m = 1; m <= m_max; ++m)
	{
		pw = pw * u;
		if (work != kExactPrec && (!pw.is_exact() || pw.top_stored() >= work))
			pw = pw.truncated(work);
		if (pw.is_zero() && pw.is_exact())
		{
			converged = true;
			break;
		}
		acc += pw.scaled(coeff_of(m));
	}
	if (!converged || !acc.is_exact())
		acc = acc.truncated(std::min(acc.precision(), prec));
	return acc;
}

} // namespace detail

/// log f = sum (-1)^{m+1} (f-1)^m / m for f in the sharp subgroup of a
/// Q-algebra; finite below any precision because positive-degree terms climb
/// and nilpotent parts die.
inline Series log_sharp(const Series &f, int prec)
{
	const Ring &r = f.ring();
	if (!r.is_q_algebra())
		throw domain_error("log requires a Q-algebra base");
	if (!is_sharp(f))
		throw domain_error("log requires an argument in the sharp subgroup");
	Series u = f - Series::one(r);
	return detail::nilpotent_power_sum(
	    u, prec, [&](int m) { return RingElem(r, Rat(m % 2 ? 1 : -1, m)); });
}

/// exp s = sum s^m / m!; defined when the coefficients of s in degrees <= 0
/// are nilpotent (Q-algebra).
inline Series exp_series(const Series &s, int prec)
{
	const Ring &r = s.ring();
	if (!r.is_q_algebra())
		throw domain_error("exp requires a Q-algebra base");
	Rat fact = 1;
	int mcur = 0;
	Series sum = detail::nilpotent_power_sum(s, prec, [&](int m) {
		while (mcur < m)
		{
			++mcur;
			fact *= mcur;
		}
		return RingElem(r, 1 / fact);
	});
	return sum + Series::one(r).truncated(sum.precision());
}

/// res(f dg): the coefficient of t^{-1} in f g'.
inline RingElem residue_pairing(const Series &f, const Series &g)
{
	Series p = f * g.derivative();
	if (!p.coeff_known(-1))
		throw precision_error("residue: t^{-1} coefficient not determined at "
		                      "this precision");
	return p.coeff(-1);
}

/// Substitution f(g): sum of f's coefficients times powers of g. Requires g
/// of substitutable shape. The result is correct below `prec`, and exact when
/// f, g and every intermediate are exact.
inline Series compose(const Series &f, const Series &g, int prec)
{
	if (!f.ring().same(g.ring()))
		throw internal_error("compose across different rings");
	const Ring &r = f.ring();
	std::string why;
	if (!is_substitutable(g, &why))
		throw domain_error("substitution series is not of automorphism shape: " +
		                   why);

	// depth of g relative to its unit order 1
	const int d = std::max(0, 1 - g.lowest());
	const int band = closure_depth_bound(r, d);
	const int work = detail::sat_add(prec, band + d + 2);
	const int i_max = detail::sat_add(prec, band); // higher terms cannot matter

	int cap = kExactPrec;
	if (!f.is_exact())
		cap = detail::sat_add(f.precision(), -band);

	const bool keep_exact = f.is_exact() && g.is_exact();
	bool cutoff_hit = false;

	auto trunc = [&](const Series &s) {
		if (keep_exact && s.is_exact())
			return s;
		return s.truncated(std::min(s.precision(), work));
	};

	// nonnegative support: Horner over the sparse exponents
	std::vector<std::pair<int, RingElem>> pos;
	for (const auto &[k, v] : f.terms())
	{
		if (k < 0)
			continue;
		if (!keep_exact && k >= i_max)
		{
			cutoff_hit = true;
			break;
		}
		pos.emplace_back(k, v);
	}
	Series acc = Series::zero(r);
	if (!pos.empty())
	{
		Series run = Series::constant(r, pos.back().second);
		for (int idx = (int)pos.size() - 2; idx >= 0; --idx)
		{
			int gap = pos[idx + 1].first - pos[idx].first;
			for (int s = 0; s < gap; ++s)
				run = trunc(run * g);
			run += Series::constant(r, pos[idx].second);
		}
		for (int s = 0; s < pos.front().first; ++s)
			run = trunc(run * g);
		acc = run;
	}

	// negative support through powers of the inverse; each extra power can
	// charge precision against the inverse's negative reach, so the inverse
	// is computed with headroom proportional to the depth of f
	if (!f.terms().empty() && f.terms().begin()->first < 0)
	{
		const int neg_depth = -f.terms().begin()->first;
		const int work_neg = detail::sat_add(work, neg_depth * (band + 2));
		Series h = invert_unit(g, work_neg);
		auto trunc_neg = [&](const Series &s) {
			if (keep_exact && s.is_exact())
				return s;
			return s.truncated(std::min(s.precision(), work_neg));
		};
		std::vector<std::pair<int, RingElem>> negs;
		for (const auto &[k, v] : f.terms())
			if (k < 0)
				negs.emplace_back(k, v);
		Series hp = Series::one(r);
		int j = 0;
		for (auto it = negs.rbegin(); it != negs.rend(); ++it)
		{
			while (j < -it->first)
			{
				hp = trunc_neg(hp * h);
				++j;
			}
			acc += hp.scaled(it->second);
		}
	}

	if (cutoff_hit)
		cap = std::min(cap, prec);
	Series out = acc.truncated(std::min(acc.precision(), cap));
	if (out.is_exact())
		return out;
	if (out.precision() < prec)
		throw precision_error("compose: inputs too shallow for the requested "
		                      "precision");
	return out.truncated(prec);
}

} // namespace ccsym

#endif
