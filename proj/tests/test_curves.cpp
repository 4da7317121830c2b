#include "carnot/bch.hpp"
#include "carnot/catalog.hpp"
#include "carnot/curves.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace carnot;

namespace {

RVec zero(const GradedAlgebra& g) { return RVec(static_cast<std::size_t>(g.dim()), 0.0); }

} // namespace

TEST(Lift, OneParameterSubgroup)
{
	auto g = free_nilpotent(2, 3);
	auto c = horizontal_lift(builtin_control(g, "line"), zero(*g), 50);
	for (std::size_t k = 0; k < c.t.size(); ++k)
	{
		RVec want = zero(*g);
		want[0] = c.t[k];
		EXPECT_LE(norm_inf(sub(c.x[k], want)), 1e-14);
	}
}

TEST(Lift, SquareLoopArea)
{
	auto h = heisenberg(1);
	auto c = horizontal_lift(builtin_control(h, "square"), zero(*h), 400);
	const RVec& end = c.x.back();
	EXPECT_NEAR(end[0], 0, 1e-12);
	EXPECT_NEAR(end[1], 0, 1e-12);
	EXPECT_NEAR(end[2], 1, 1e-8);
	EXPECT_TRUE(is_horizontal(c, 1e-6).horizontal);
}

TEST(Lift, ParabolaClosedForm)
{
	auto h = heisenberg(1);
	auto c = horizontal_lift(builtin_control(h, "parabola"), zero(*h), 200);
	for (std::size_t k = 0; k < c.t.size(); ++k)
	{
		double t = c.t[k];
		EXPECT_NEAR(c.x[k][0], t, 1e-12);
		EXPECT_NEAR(c.x[k][1], t * t, 1e-12);
		EXPECT_NEAR(c.x[k][2], t * t * t / 6, 1e-8);
	}
	EXPECT_TRUE(is_horizontal(c, 1e-6).horizontal);
}

TEST(Lift, RejectsVerticalControl)
{
	auto h = heisenberg(1);
	HorizontalControl bad(h, 0, 1, [](double) { return RVec{0, 0, 1}; });
	EXPECT_THROW(horizontal_lift(bad, zero(*h), 10), std::invalid_argument);
}

TEST(Lift, HorizontalityDetectsVerticalCurve)
{
	auto h = heisenberg(1);
	SampledCurve c{h, {}, {}, {}, 0, 0};
	for (int k = 0; k <= 20; ++k)
	{
		c.t.push_back(k / 20.0);
		c.x.push_back({0, 0, k / 20.0});
	}
	auto r = is_horizontal(c, 1e-6);
	EXPECT_FALSE(r.horizontal);
	EXPECT_NEAR(r.max_residual, 1, 1e-12);
	SampledCurve line{h, {0, 0.5, 1}, {{0, 0, 0}, {0.5, 0, 0}, {1, 0, 0}}, {}, 0, 0};
	EXPECT_EQ(is_horizontal(line, 0).max_residual, 0);
}

TEST(Lift, LeftTranslationAndDilation)
{
	for (const auto& g : {heisenberg(2), free_nilpotent(2, 3), complexified_heisenberg()})
	{
		auto u = builtin_control(g, "circle");
		auto base = horizontal_lift(u, zero(*g), 256);
		RVec p = zero(*g);
		for (std::size_t i = 0; i < p.size(); ++i) p[i] = 0.3 * static_cast<double>(i + 1) - 0.7;
		auto moved = horizontal_lift(u, p, 256);
		for (std::size_t k = 0; k < base.x.size(); k += 16)
			EXPECT_LE(norm_inf(sub(moved.x[k], group_product(*g, p, base.x[k]))), 1e-9);

		double r = 1.7;
		HorizontalControl ur(g, u.a(), u.b(), [&](double t) { return scale(r, u(t)); });
		auto scaled = horizontal_lift(ur, zero(*g), 256);
		for (std::size_t k = 0; k < base.x.size(); k += 16)
			EXPECT_LE(norm_inf(sub(scaled.x[k], dilate(*g, base.x[k], r))), 1e-9);
	}
}

TEST(Lift, LayerwiseGrowthBound)
{
	// |pi_i(segment over [0, lambda])| <= (sup-average * lambda)^i
	for (const auto& g : {heisenberg(1), free_nilpotent(2, 3)})
	{
		auto u = builtin_control(g, "circle");
		for (double lam : {1.0, 0.5, 0.1, 0.01})
		{
			auto seg = horizontal_lift(u.restrict(0, lam), zero(*g), 64).x.back();
			double a = sup_average(u, 0, lam);
			for (int i = 1; i <= g->step(); ++i) EXPECT_LE(layer_norm(*g, seg, i), std::pow(a * lam, i));
		}
	}
}

TEST(Pansu, OneParameterSubgroupIsExact)
{
	auto h = heisenberg(1);
	auto u = builtin_control(h, "line");
	for (double hh : {0.1, 0.01, 1e-3, -0.05}) EXPECT_LE(norm2(pansu_quotient(u, 0.5, hh)), 1e-12);
}

TEST(Pansu, CircleOrder)
{
	std::vector<double> hs{1e-1, 1e-2, 1e-3, 1e-4};
	for (const auto& g : {heisenberg(1), free_nilpotent(2, 3)})
	{
		auto s = pansu_order(builtin_control(g, "circle"), 0.0, hs);
		EXPECT_GE(s.order, 1.0 - 0.01) << g->name();
		EXPECT_LE(s.value.back(), 1e-3);
	}
}

TEST(Pansu, SupAverage)
{
	auto h = heisenberg(1);
	EXPECT_NEAR(sup_average(builtin_control(h, "circle"), 1.0, 0.5), 1.0, 1e-12);
	// |u| = sqrt(1 + 4t^2) is increasing: the full-window mean wins
	auto p = builtin_control(h, "parabola");
	double exact = (2 * std::sqrt(5.0) + std::asinh(2.0)) / 4;
	EXPECT_NEAR(sup_average(p, 0, 1), exact, 1e-6);
	EXPECT_NEAR(sup_average(p, 0.3, 1e-6), std::sqrt(1 + 4 * 0.09), 1e-5);
	EXPECT_THROW(sup_average(p, 0.5, 0.9), std::out_of_range);
}

TEST(Riemann, ClosedForms)
{
	auto h = heisenberg(1);
	double s = 0.8;
	CurveFn line = [](double t) { return RVec{t, t, 0}; };
	CurveFn dline = [](double) { return RVec{1, 1, 0}; };
	RVec lim = riemann_limit(*h, line, dline, s);
	EXPECT_LE(norm_inf(sub(lim, RVec{s, s, 0})), 1e-14);

	CurveFn par = [](double t) { return RVec{t, t * t, 0}; };
	CurveFn dpar = [](double t) { return RVec{1, 2 * t, 0}; };
	RVec lp = riemann_limit(*h, par, dpar, s);
	EXPECT_LE(norm_inf(sub(lp, RVec{s, s * s, -s * s * s / 6})), 1e-6);

	RVec one = group_riemann_sum(*h, par, {0, s});
	EXPECT_EQ(one, group_product(*h, negate(par(0)), par(s)));

	std::vector<double> mesh, err;
	for (int n : {16, 32, 64, 128})
	{
		std::vector<double> part;
		for (int k = 0; k <= n; ++k) part.push_back(s * k / n);
		mesh.push_back(s / n);
		err.push_back(norm2(sub(group_riemann_sum(*h, par, part), lp)));
	}
	EXPECT_GE(fit_order(mesh, err), 1.0 - 0.01);
}

TEST(Riemann, SampledCurveMatchesCallable)
{
	auto h = heisenberg(1);
	auto c = horizontal_lift(builtin_control(h, "parabola"), zero(*h), 64);
	std::vector<std::size_t> idx;
	std::vector<double> part;
	for (std::size_t k = 0; k <= 64; k += 4)
	{
		idx.push_back(k);
		part.push_back(c.t[k]);
	}
	CurveFn exact = [](double t) { return RVec{t, t * t, t * t * t / 6}; };
	EXPECT_LE(norm_inf(sub(group_riemann_sum(c, idx), group_riemann_sum(*h, exact, part))), 1e-8);
}

TEST(Variation, LineAndCircle)
{
	auto h = heisenberg(1);
	HomogeneousMetric m(h, MetricKind::koranyi);
	auto line = builtin_control(h, "line");
	auto cl = horizontal_lift(line, zero(*h), 64);
	auto vl = variation(cl, line, m);
	EXPECT_NEAR(vl.partition_sup, 1, 1e-12);
	EXPECT_NEAR(vl.quadrature, 1, 1e-12);

	auto circ = builtin_control(h, "circle");
	auto cc = horizontal_lift(circ, zero(*h), 1 << 14);
	auto vc = variation(cc, circ, m);
	EXPECT_NEAR(vc.quadrature, 2 * std::numbers::pi, 1e-10);
	EXPECT_LE(vc.relative_gap, 1e-4);
	EXPECT_EQ(vc.dyadic_levels, 15);

	// reparametrization t -> t^2 of the line
	SampledCurve rep{h, {}, {}, {}, 0, 0};
	for (int k = 0; k <= 64; ++k)
	{
		double t = k / 64.0;
		rep.t.push_back(t);
		rep.x.push_back({t * t, 0, 0});
	}
	EXPECT_NEAR(variation_partition(rep, m), 1, 1e-12);
}

TEST(Variation, SquareLoop)
{
	auto h = heisenberg(1);
	HomogeneousMetric m(h, MetricKind::koranyi);
	auto u = builtin_control(h, "square");
	auto c = horizontal_lift(u, zero(*h), 1 << 12);
	auto v = variation(c, u, m);
	EXPECT_NEAR(v.quadrature, 4, 1e-12);
	EXPECT_LE(v.relative_gap, 1e-4);
}

TEST(Lipschitz, Characterization)
{
	auto h = heisenberg(1);
	HomogeneousMetric m(h, MetricKind::koranyi);
	auto line = horizontal_lift(builtin_control(h, "line"), zero(*h), 32);
	auto rl = verify_ac_lip_characterization(line, m);
	EXPECT_TRUE(rl.consistent);
	EXPECT_NEAR(rl.lip_group, 1, 1e-12);

	auto sq = horizontal_lift(builtin_control(h, "square"), zero(*h), 400);
	auto rs = verify_ac_lip_characterization(sq, m);
	EXPECT_TRUE(rs.consistent);
	EXPECT_NEAR(rs.ratio, 1, 1e-3);

	SampledCurve vert{h, {}, {}, {}, 0, 0};
	for (int k = 0; k <= 20; ++k)
	{
		vert.t.push_back(k / 20.0);
		vert.x.push_back({0, 0, k / 20.0});
	}
	auto rv = verify_ac_lip_characterization(vert, m);
	EXPECT_FALSE(rv.horizontal);
	EXPECT_FALSE(rv.consistent);
}
