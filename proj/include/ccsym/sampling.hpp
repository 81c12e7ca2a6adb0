#ifndef CCSYM_SAMPLING_HPP
#define CCSYM_SAMPLING_HPP

#include "ccsym/series.hpp"

namespace ccsym {

/// Shape parameters for the seeded series samplers. Everything sampled is an
/// exact Laurent polynomial, so downstream checks stay exact.
struct SeriesSamplerConfig {
	int max_depth = 2;   // how far below the unit order coefficients may sit
	int max_top = 3;     // how far above
	int nu_min = -2;     // unit order range
	int nu_max = 2;
	int density = 60;    // percent chance a slot is filled
	ElemSamplerConfig elem = {};
};

inline Series sample_unit_series(const Ring &r, Rng &rng,
                                 const SeriesSamplerConfig &cfg = {})
{
	int nu = (int)rng.range(cfg.nu_min, cfg.nu_max);
	Series s = Series::monomial(r, sample_unit(r, rng, cfg.elem), nu);
	int depth = (int)rng.range(0, cfg.max_depth);
	for (int i = nu - depth; i < nu; ++i)
		if (rng.chance(cfg.density))
			s += Series::monomial(r, sample_nilpotent(r, rng, cfg.elem), i);
	int top = (int)rng.range(0, cfg.max_top);
	for (int i = nu + 1; i <= nu + top; ++i)
		if (rng.chance(cfg.density))
			s += Series::monomial(r, sample_elem(r, rng, cfg.elem), i);
	return s;
}

/// A series of substitution shape: nilpotent below degree 1, unit at degree 1.
inline Series sample_substitutable(const Ring &r, Rng &rng,
                                   const SeriesSamplerConfig &cfg = {})
{
	Series s = Series::monomial(r, sample_unit(r, rng, cfg.elem), 1);
	int depth = (int)rng.range(0, cfg.max_depth);
	for (int i = -depth; i <= 0; ++i)
		if (rng.chance(cfg.density))
			s += Series::monomial(r, sample_nilpotent(r, rng, cfg.elem), i);
	int top = (int)rng.range(0, cfg.max_top);
	for (int i = 2; i <= 1 + top; ++i)
		if (rng.chance(cfg.density))
			s += Series::monomial(r, sample_elem(r, rng, cfg.elem), i);
	return s;
}

/// Member of the sharp subgroup: 1 + nilpotent in degrees <= 0, anything above.
inline Series sample_sharp_series(const Ring &r, Rng &rng,
                                  const SeriesSamplerConfig &cfg = {})
{
	Series s = Series::one(r);
	int depth = (int)rng.range(0, cfg.max_depth);
	for (int i = -depth; i <= 0; ++i)
		if (rng.chance(cfg.density))
			s += Series::monomial(r, sample_nilpotent(r, rng, cfg.elem), i);
	int top = (int)rng.range(0, cfg.max_top);
	for (int i = 1; i <= top; ++i)
		if (rng.chance(cfg.density))
			s += Series::monomial(r, sample_elem(r, rng, cfg.elem), i);
	return s;
}

/// Plain Laurent polynomial (used as a derivation coefficient).
inline Series sample_laurent_polynomial(const Ring &r, Rng &rng,
                                        const SeriesSamplerConfig &cfg = {})
{
	Series s = Series::zero(r);
	for (int i = -cfg.max_depth; i <= cfg.max_top; ++i)
		if (rng.chance(cfg.density))
			s += Series::monomial(r, sample_elem(r, rng, cfg.elem), i);
	return s;
}

} // namespace ccsym

#endif
