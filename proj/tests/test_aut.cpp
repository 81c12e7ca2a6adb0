#include "ccsym/aut.hpp"

#include "ccsym/sampling.hpp"
#include "gtest/gtest.h"

using namespace ccsym;

namespace {

Ring q_ring() { return Ring(RingDescriptor{}); }

Ring q_eps(int order = 2)
{
	return Ring(RingDescriptor{BaseKind::rationals, 0, {{"e", order}}});
}

Ring z_mod(int m) { return Ring(RingDescriptor{BaseKind::integers_mod, m, {}}); }

RingElem eps(const Ring &r) { return RingElem::generator(r, r.generator_index("e")); }

AutElem sample_aut(const Ring &r, Rng &rng)
{
	SeriesSamplerConfig cfg;
	cfg.max_depth = 1;
	cfg.max_top = 2;
	return AutElem(sample_substitutable(r, rng, cfg));
}

} // namespace

TEST(Aut, Validation)
{
	Ring q = q_ring();
	EXPECT_TRUE(AutElem::identity(q).is_identity());
	Ring r = q_eps();
	EXPECT_NO_THROW(AutElem(Series::t(r) + Series::monomial(r, eps(r), -1)));
	// 1 is not nilpotent over Q, so t + t^-1 is rejected
	try
	{
		AutElem(Series::t(q) + Series::monomial(q, RingElem::one(q), -1));
		FAIL() << "expected domain_error";
	}
	catch (const domain_error &e)
	{
		EXPECT_NE(std::string(e.what()).find("t^-1"), std::string::npos);
	}
	// vanishing linear coefficient
	EXPECT_THROW(AutElem(Series::monomial(q, RingElem::one(q), 2)), domain_error);
}

TEST(Aut, MulExamples)
{
	Ring q = q_ring();
	Rng rng(3);
	for (int i = 0; i < 10; ++i)
	{
		AutElem phi = sample_aut(q_eps(), rng);
		AutElem id = AutElem::identity(phi.ring());
		EXPECT_TRUE(agree_below(mul(id, phi, 12).tilde(), phi.tilde(), 12));
		EXPECT_TRUE(agree_below(mul(phi, id, 12).tilde(), phi.tilde(), 12));
	}

	// phi1 = 2t, phi2 = t + t^2: the product sends t to 2t + 4t^2
	AutElem phi1(Series::monomial(q, RingElem(q, 2), 1));
	AutElem phi2(Series::t(q) + Series::monomial(q, RingElem::one(q), 2));
	Series got = mul(phi1, phi2, 16).tilde();
	Series expected = Series::from_terms(
	    q, {{1, RingElem(q, 2)}, {2, RingElem(q, 4)}});
	EXPECT_EQ(got, expected);
}

TEST(Aut, TauExamples)
{
	Ring q = q_ring();
	EXPECT_EQ(tau(AutElem::identity(q)), Series::one(q));

	AutElem phi(Series::t(q) + Series::monomial(q, RingElem::one(q), 2));
	EXPECT_EQ(tau(phi), Series::one(q) + Series::monomial(q, RingElem(q, 2), 1));

	Ring r = q_eps();
	AutElem psi(Series::t(r) + Series::monomial(r, eps(r), -1));
	Series tp = tau(psi);
	EXPECT_EQ(tp, Series::one(r) - Series::monomial(r, eps(r), -2));
	EXPECT_EQ(unit_order(tp), 0);
}

TEST(Aut, InverseExamples)
{
	Ring r = q_eps();
	AutElem phi(Series::t(r) + Series::constant(r, eps(r)));
	AutElem inv = inverse(phi, 12);
	EXPECT_TRUE(agree_below(inv.tilde(),
	                        Series::t(r) - Series::constant(r, eps(r)), 12));

	Ring q = q_ring();
	AutElem two_t(Series::monomial(q, RingElem(q, 2), 1));
	EXPECT_TRUE(agree_below(inverse(two_t, 8).tilde(),
	                        Series::monomial(q, RingElem(q, Rat(1, 2)), 1), 8));

	// t + t^2 inverts to t - t^2 + 2t^3 - 5t^4 (Catalan signs)
	AutElem par(Series::t(q) + Series::monomial(q, RingElem::one(q), 2));
	Series got = inverse(par, 5).tilde();
	Series expected = Series::from_terms(q,
	                                     {{1, RingElem(q, 1)},
	                                      {2, RingElem(q, -1)},
	                                      {3, RingElem(q, 2)},
	                                      {4, RingElem(q, -5)}},
	                                     5);
	EXPECT_TRUE(agree_below(got, expected, 5));
	// composition oracle both ways
	EXPECT_TRUE(agree_below(compose(got, par.tilde(), 5), Series::t(q), 5));
	EXPECT_TRUE(agree_below(compose(par.tilde(), got, 5), Series::t(q), 5));
}

TEST(Aut, GroupAxiomsOnSampledElements)
{
	for (const Ring &r : {q_eps(), z_mod(4)})
	{
		Rng rng(19);
		const int p = 10;
		for (int i = 0; i < 8; ++i)
		{
			AutElem a = sample_aut(r, rng), b = sample_aut(r, rng),
			        c = sample_aut(r, rng);
			Series lhs = mul(mul(a, b, p + 10), c, p).tilde();
			Series rhs = mul(a, mul(b, c, p + 10), p).tilde();
			EXPECT_TRUE(agree_below(lhs, rhs, p));

			AutElem ai = inverse(a, p + 10);
			EXPECT_TRUE(
			    agree_below(mul(a, ai, p).tilde(), Series::t(r), p));
			EXPECT_TRUE(
			    agree_below(mul(ai, a, p).tilde(), Series::t(r), p));
		}
	}
}

TEST(Aut, TauIsAOneCocycle)
{
	for (const Ring &r : {q_eps(), z_mod(8)})
	{
		Rng rng(23);
		const int p = 10;
		for (int i = 0; i < 10; ++i)
		{
			AutElem a = sample_aut(r, rng), b = sample_aut(r, rng);
			Series lhs = tau(mul(a, b, p + 8));
			Series rhs = tau(a) * apply(a, tau(b), p + 4);
			EXPECT_TRUE(agree_below(lhs, rhs, p - 2));
		}
	}
}

TEST(Aut, DecomposeIdentity)
{
	Ring r = q_eps();
	for (auto v : {DecompositionVariant::plus1_minus0,
	               DecompositionVariant::plus_minus,
	               DecompositionVariant::minus0_plus1,
	               DecompositionVariant::minus_plus})
	{
		auto [a, b] = decompose(AutElem::identity(r), v, 10);
		EXPECT_TRUE(a.is_identity());
		EXPECT_TRUE(b.is_identity());
	}
}

TEST(Aut, DecomposeShiftExamples)
{
	Ring r = q_eps();
	AutElem phi(Series::t(r) + Series::constant(r, eps(r)));

	auto [a1, b1] = decompose(phi, DecompositionVariant::plus_minus, 10);
	EXPECT_TRUE(agree_below(a1.tilde(), phi.tilde(), 10));
	EXPECT_TRUE(b1.is_identity());

	auto [a2, b2] = decompose(phi, DecompositionVariant::plus1_minus0, 10);
	EXPECT_TRUE(a2.is_identity());
	EXPECT_TRUE(agree_below(b2.tilde(), phi.tilde(), 10));
}

TEST(Aut, DecomposeRoundTripOnSampledElements)
{
	for (const Ring &r : {q_eps(), z_mod(4)})
	{
		Rng rng(31);
		const int p = 10;
		for (int i = 0; i < 6; ++i)
		{
			AutElem phi = sample_aut(r, rng);
			for (auto v : {DecompositionVariant::plus1_minus0,
			               DecompositionVariant::plus_minus,
			               DecompositionVariant::minus0_plus1,
			               DecompositionVariant::minus_plus})
			{
				auto [a, b] = decompose(phi, v, p);
				EXPECT_TRUE(factor_shapes_ok(v, a.tilde(), b.tilde()));
				Series re = mul(a, b, p - 2).tilde();
				EXPECT_TRUE(agree_below(re, phi.tilde(), p - 2))
				    << "variant failed for " << phi;
				// decomposing the recomposition gives the same factors
				auto [a2, b2] = decompose(mul(a, b, p), v, p - 2);
				EXPECT_TRUE(agree_below(a2.tilde(), a.tilde(), p - 4));
				EXPECT_TRUE(agree_below(b2.tilde(), b.tilde(), p - 4));
			}
		}
	}
}

TEST(Aut, ReducedRingsAreAllPlusOne)
{
	for (const Ring &r : {q_ring(), z_mod(3)})
	{
		Rng rng(41);
		for (int i = 0; i < 10; ++i)
		{
			AutElem phi = sample_aut(r, rng);
			EXPECT_TRUE(in_aut_plus1(phi.tilde()));
			auto [a, b] =
			    decompose(phi, DecompositionVariant::plus1_minus0, 10);
			EXPECT_TRUE(b.is_identity());
			EXPECT_TRUE(agree_below(a.tilde(), phi.tilde(), 10));
		}
	}
}
