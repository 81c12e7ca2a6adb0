#ifndef CCSYM_AUT_HPP
#define CCSYM_AUT_HPP

#include <utility>

#include "ccsym/series.hpp"

namespace ccsym {

/// Continuous ring automorphism of A((t)), stored through the series it sends
/// t to. Valid shapes have nilpotent coefficients below degree 1 and a unit
/// at degree 1; the automorphism acts on series by substitution.
class AutElem {
	Series tilde_;

public:
	explicit AutElem(Series tilde) : tilde_(std::move(tilde))
	{
		std::string why;
		if (!is_substitutable(tilde_, &why))
			throw domain_error("not an automorphism image of t: " + why);
	}

	static AutElem identity(const Ring &r) { return AutElem(Series::t(r)); }

	const Series &tilde() const { return tilde_; }
	const Ring &ring() const { return tilde_.ring(); }

	bool is_identity() const
	{
		return tilde_.terms().size() == 1 && tilde_.coeff(1).is_one();
	}

	bool operator==(const AutElem &o) const { return tilde_ == o.tilde_; }

	friend std::ostream &operator<<(std::ostream &os, const AutElem &a)
	{
		return os << a.tilde_;
	}
};

inline AutElem aut_from_series(const Series &tilde) { return AutElem(tilde); }

/// Action on a series: phi(s) = s(phi(t)).
inline Series apply(const AutElem &phi, const Series &s, int prec)
{
	return compose(s, phi.tilde(), prec);
}

/// Group law; the product acts by phi1 after phi2, so the image of t
/// composes the other way around.
inline AutElem mul(const AutElem &a, const AutElem &b, int prec)
{
	return AutElem(compose(b.tilde(), a.tilde(), prec));
}

/// tau(phi) = d phi(t) / dt, a unit of A((t)) and a 1-cocycle for the
/// substitution action.
inline Series tau(const AutElem &phi) { return phi.tilde().derivative(); }

// -- subgroup membership (within the known coefficient window) ------------

inline bool in_aut_plus1(const Series &tilde)
{
	if (!tilde.coeff_known(1) || !tilde.coeff(1).is_unit())
		return false;
	auto it = tilde.terms().begin();
	return it == tilde.terms().end() || it->first >= 1;
}

inline bool in_aut_plus(const Series &tilde)
{
	if (!tilde.coeff_known(1) || !tilde.coeff(1).is_unit())
		return false;
	for (const auto &[k, v] : tilde.terms())
	{
		if (k >= 1)
			break;
		if (k < 0)
			return false;
		if (!v.is_nilpotent())
			return false;
	}
	return true;
}

inline bool in_aut_minus0(const Series &tilde)
{
	if (!tilde.coeff_known(1) || !tilde.coeff(1).is_one())
		return false;
	for (const auto &[k, v] : tilde.terms())
	{
		if (k <= 0 && !v.is_nilpotent())
			return false;
		if (k >= 2)
			return false;
	}
	return true;
}

inline bool in_aut_minus(const Series &tilde)
{
	return in_aut_minus0(tilde) && tilde.terms().find(0) == tilde.terms().end();
}

/// Compositional inverse of a power series a1 t + a2 t^2 + ... with unit a1,
/// by Newton refinement; divides only by units, so it works over any
/// supported ring. Correct below `prec`.
inline Series reversion(const Series &p, int prec)
{
	const Ring &r = p.ring();
	if (!p.coeff_known(1) || !p.coeff(1).is_unit())
		throw domain_error("reversion needs a unit coefficient at t");
	if (!p.terms().empty() && p.terms().begin()->first < 1)
		throw domain_error("reversion needs a pure power series");
	RingElem a1 = p.coeff(1);
	Series q = Series::monomial(r, a1.inv(), 1); // exact candidate polynomial
	if (prec <= 2)
		return q.truncated(prec);
	int n = 1; // p(q) = t mod t^{n+1}
	while (n < prec - 1)
	{
		int n2 = std::min(2 * n + 1, prec - 1);
		Series e = compose(p, q, n2 + 1) - Series::t(r);
		if (!e.is_zero())
		{
			Series dpi = invert_unit(compose(p.derivative(), q, n2 + 1), n2 + 1);
			Series dq = e * dpi;
			// coefficients below n2+1 are final by triangularity; keep the
			// candidate an exact polynomial
			q = (q - dq).truncated(n2 + 1).exact_polynomial();
		}
		n = n2;
	}
	return q.truncated(prec);
}

namespace detail {

/// Peels power-series factors off the right of `tilde` until only the
/// identity remains above degree 1: returns (H, m) with tilde(H(t)) = m(t),
/// H a power series with unit linear coefficient and m = t + terms of
/// degree <= 0 with nilpotent coefficients. Terminates within nil_index
/// passes because each pass pushes the coefficients above degree 1 into a
/// deeper power of the ideal generated by the low coefficients.
inline std::pair<Series, Series> straighten(const Series &tilde, int prec)
{
	const Ring &r = tilde.ring();
	Series g = tilde;
	Series H = Series::t(r);
	for (int pass = 0;; ++pass)
	{
		bool done = g.coeff(1).is_one();
		if (done)
			for (const auto &[k, v] : g.terms())
				if (k >= 2)
				{
					done = false;
					break;
				}
		if (done)
			break;
		if (pass > r.nil_index() + 1)
			throw internal_error("straighten did not terminate");
		Series pos(r);
		for (const auto &[k, v] : g.terms())
			if (k >= 1)
				pos += Series::monomial(r, v, k);
		pos = pos.truncated(g.precision());
		Series h = reversion(pos, prec);
		g = compose(g, h, prec);
		H = compose(H, h, prec);
	}
	return {H, g};
}

/// Compositional inverse of m = t + c with c supported in degrees <= 0 and
/// nilpotent: iterated cancellation, one nil grade per pass.
inline Series reversion_minus0(const Series &m, int prec)
{
	const Ring &r = m.ring();
	Series rres = m;
	Series M = Series::t(r);
	for (int pass = 0;; ++pass)
	{
		Series c = rres - Series::t(r);
		if (c.is_zero())
			break;
		if (pass > r.nil_index() + 1)
			throw internal_error("reversion_minus0 did not terminate");
		Series s = Series::t(r) - c.exact_polynomial();
		rres = compose(rres, s, prec);
		M = compose(M, s, prec);
	}
	return M;
}

} // namespace detail

/// Group inverse: the compositional inverse series on both sides. Built by
/// first straightening the power-series part, then cancelling the nilpotent
/// tail through powers of the ideal it generates.
inline AutElem inverse(const AutElem &phi, int prec)
{
	const Ring &r = phi.ring();
	const int depth = phi.tilde().principal_depth();
	const int band = closure_depth_bound(r, depth + 1);
	const int work =
	    detail::sat_add(prec, (r.nil_index() + 3) * (band + depth + 2));
	auto [H, m] = detail::straighten(phi.tilde(), work);
	Series M = detail::reversion_minus0(m, work);
	Series psi = compose(H, M, prec);
	AutElem out(psi);
	// certification at a small window; failure indicates a bug
	const int w = std::min(prec, 8);
	Series round = compose(psi, phi.tilde(), w);
	if (!agree_below(round, Series::t(r), w))
		throw internal_error("inverse certification failed");
	return out;
}

enum class DecompositionVariant {
	plus1_minus0, // power series with unit slope, then nilpotent tail with slope 1
	plus_minus,   // nilpotent constant allowed left, no constant right
	minus0_plus1,
	minus_plus,
};

inline bool factor_shapes_ok(DecompositionVariant v, const Series &a,
                             const Series &b)
{
	switch (v)
	{
	case DecompositionVariant::plus1_minus0:
		return in_aut_plus1(a) && in_aut_minus0(b);
	case DecompositionVariant::plus_minus:
		return in_aut_plus(a) && in_aut_minus(b);
	case DecompositionVariant::minus0_plus1:
		return in_aut_minus0(a) && in_aut_plus1(b);
	case DecompositionVariant::minus_plus:
		return in_aut_minus(a) && in_aut_plus(b);
	}
	return false;
}

/// Unique two-factor decomposition of phi for the requested variant. The
/// result is certified by shape tests and by recomposing.
inline std::pair<AutElem, AutElem> decompose(const AutElem &phi,
                                             DecompositionVariant variant,
                                             int prec)
{
	const Ring &r = phi.ring();
	const int depth = phi.tilde().principal_depth();
	const int band = closure_depth_bound(r, depth + 1);
	const int work =
	    detail::sat_add(prec, (r.nil_index() + 3) * (band + depth + 2));

	auto make = [&](Series a, Series b) {
		std::pair<AutElem, AutElem> out{AutElem(a.truncated(prec)),
		                                AutElem(b.truncated(prec))};
		if (!factor_shapes_ok(variant, out.first.tilde(), out.second.tilde()))
			throw internal_error("decomposition factors fail their shape test");
		const int w = std::min(prec, 8);
		Series recomposed =
		    compose(out.second.tilde(), out.first.tilde(), w);
		if (!agree_below(recomposed, phi.tilde(), w))
			throw internal_error("decomposition does not recompose");
		return out;
	};

	switch (variant)
	{
	case DecompositionVariant::plus1_minus0:
	{
		auto [H, m] = detail::straighten(phi.tilde(), work);
		return make(reversion(H, work), m);
	}
	case DecompositionVariant::plus_minus:
	{
		auto [H, m] = detail::straighten(phi.tilde(), work);
		Series alpha = reversion(H, work);
		RingElem c0 = m.coeff(0);
		Series beta =
		    compose(m, Series::t(r) - Series::constant(r, c0), work);
		return make(alpha + Series::constant(r, c0), beta);
	}
	case DecompositionVariant::minus0_plus1:
	{
		AutElem chi = inverse(phi, work);
		auto [H, m] = detail::straighten(chi.tilde(), work);
		// phi = m^{-1} * (H-reversion)^{-1} reversed through the inverses
		Series beta_inv = detail::reversion_minus0(m, work);
		return make(beta_inv, H);
	}
	case DecompositionVariant::minus_plus:
	{
		AutElem chi = inverse(phi, work);
		auto [ap, bp] = decompose(chi, DecompositionVariant::plus_minus, work);
		Series beta_inv = inverse(bp, work).tilde();
		Series alpha_inv = inverse(ap, work).tilde();
		return make(beta_inv, alpha_inv);
	}
	}
	throw internal_error("unknown decomposition variant");
}

} // namespace ccsym

#endif
