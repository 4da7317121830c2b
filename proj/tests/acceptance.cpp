// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "carnot/bch.hpp"
#include "carnot/catalog.hpp"
#include "carnot/curves.hpp"
#include "carnot/free_lie.hpp"
#include "carnot/metric.hpp"
#include "carnot/pdiff.hpp"
#include "carnot/subgroups.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace carnot;

namespace {

// Collects the first failure message; later checks still run so the whole
// criterion is exercised.
class Checker
{
public:
	void expect(bool ok, const std::string& what)
	{
		++count_;
		if (!ok && first_.empty()) first_ = what;
	}
	void at_most(double value, double bound, const std::string& what)
	{
		std::ostringstream s;
		s << what << " = " << value << " > " << bound;
		expect(value <= bound, s.str());
	}
	void at_least(double value, double bound, const std::string& what)
	{
		std::ostringstream s;
		s << what << " = " << value << " < " << bound;
		expect(value >= bound, s.str());
	}
	const std::string& first() const { return first_; }
	int count() const { return count_; }
	std::string note;

private:
	std::string first_;
	int count_ = 0;
};

int failures = 0;

void criterion(int id, const std::string& name, double time_limit, const std::function<void(Checker&)>& body)
{
	Checker c;
	auto t0 = std::chrono::steady_clock::now();
	try
	{
		body(c);
	}
	catch (const std::exception& e)
	{
		c.expect(false, std::string("exception: ") + e.what());
	}
	double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
	if (time_limit > 0) c.at_most(secs, time_limit, "runtime (s)");
	bool ok = c.first().empty();
	if (!ok) ++failures;
	std::printf("%s [%2d] %-28s %4d checks %7.2fs%s%s\n", ok ? "PASS" : "FAIL", id, name.c_str(), c.count(), secs,
	            ok ? "" : "  ", ok ? "" : c.first().c_str());
	if (!c.note.empty()) std::printf("          %s\n", c.note.c_str());
	std::fflush(stdout);
}

QVec random_q(std::mt19937_64& rng, std::size_t n, int range = 5)
{
	std::uniform_int_distribution<int> num(-range, range), den(1, 4);
	QVec v(n);
	for (auto& c : v)
	{
		c = Rational(num(rng), den(rng));
		c.canonicalize();
	}
	return v;
}

QVec horizontal_q(std::mt19937_64& rng, const GradedAlgebra& g, int range = 2)
{
	QVec v = random_q(rng, static_cast<std::size_t>(g.dim()), range);
	for (int i = 0; i < g.dim(); ++i)
		if (g.layer_of(i) != 1) v[static_cast<std::size_t>(i)] = 0;
	return v;
}

QMatrix coordinate_map(const GradedAlgebra& g, std::vector<int> rows)
{
	QMatrix m(rows.size(), static_cast<std::size_t>(g.dim()));
	for (std::size_t r = 0; r < rows.size(); ++r) m(r, static_cast<std::size_t>(rows[r])) = 1;
	return m;
}

QVec qv(std::initializer_list<long> xs)
{
	QVec v;
	for (long x : xs) v.emplace_back(x);
	return v;
}

RVec zero(const GradedAlgebra& g) { return RVec(static_cast<std::size_t>(g.dim()), 0.0); }

// Every complementary pair met anywhere in the suite is checked for additivity
// of the homogeneous dimension.
int qkp_checked = 0, qkp_failed = 0;

void record_pair(const HomogeneousSubalgebra& a, const HomogeneousSubalgebra& b)
{
	++qkp_checked;
	if (!check_qkp(a, b)) ++qkp_failed;
}

const RVec xi{0, 1, 0, 1, 0};
const RVec eta{0, 0, 1, 1, 0};

double rel_drift(double a, double b) { return a > 0 ? std::abs(b - a) / a : std::abs(b); }

} // namespace

int main()
{
	criterion(1, "bch_vs_series_oracle", 60, [](Checker& c) {
		std::mt19937_64 rng(101);
		for (const char* name : {"h1", "h2", "h2_1", "free_2_3", "g42"})
		{
			AlgebraPtr g = catalog_by_name(name);
			auto n = static_cast<std::size_t>(g->dim());
			for (int t = 0; t < 100; ++t)
			{
				QVec x = random_q(rng, n), y = random_q(rng, n);
				c.expect(group_product(*g, x, y) == series_oracle_product(*g, x, y), std::string("product ") + name);
			}
			for (int t = 0; t < 50; ++t)
			{
				QVec x = random_q(rng, n), y = random_q(rng, n), z = random_q(rng, n);
				c.expect(group_product(*g, group_product(*g, x, y), z) == group_product(*g, x, group_product(*g, y, z)),
				         std::string("associativity ") + name);
			}
		}
	});

	criterion(2, "bch_term_structure", 0, [](Checker& c) {
		std::mt19937_64 rng(202);
		AlgebraPtr f = free_nilpotent(2, 4);
		auto n = static_cast<std::size_t>(f->dim());
		for (int t = 0; t < 20; ++t)
		{
			QVec x = random_q(rng, n), y = random_q(rng, n);
			c.expect(bch_term(*f, 1, x, y) == add(x, y), "c1 = X + Y");
			c.expect(bch_term(*f, 2, x, y) == scale(Rational(1, 2), f->bracket(x, y)), "c2 = [X,Y]/2");
			Rational lam(random_q(rng, 1)[0]);
			if (is_zero(lam)) lam = Rational(2, 3);
			Rational pw = 1;
			for (int k = 1; k <= 4; ++k)
			{
				pw *= lam;
				c.expect(bch_term(*f, k, scale(lam, x), scale(lam, y)) == scale(pw, bch_term(*f, k, x, y)),
				         "homogeneity of c_" + std::to_string(k));
			}
			for (const char* name : {"h2", "free_2_3", "g42"})
			{
				AlgebraPtr g = catalog_by_name(name);
				auto d = static_cast<std::size_t>(g->dim());
				c.expect(is_zero_vector(cn_remainder(*g, 2, random_q(rng, d), random_q(rng, d))),
				         std::string("R2 = 0 in ") + name);
			}
		}
		for (int k = 2; k <= 4; ++k)
		{
			LnDecomposition d = decompose_cn(k);
			const GradedAlgebra& fa = hall_basis(2, k).algebra();
			c.expect(evaluate_decomposition(fa, d, fa.basis_vector(0), fa.basis_vector(1)) ==
			             BchTermCache::for_step(k).term(k),
			         "decompose_cn in the free algebra, n = " + std::to_string(k));
			for (int t = 0; t < 10; ++t)
			{
				QVec x = random_q(rng, n), y = random_q(rng, n);
				c.expect(evaluate_decomposition(*f, d, x, y) == bch_term(*f, k, x, y),
				         "decompose_cn on random elements, n = " + std::to_string(k));
			}
		}
	});

	criterion(3, "horizontal_lift", 10, [](Checker& c) {
		auto h = heisenberg(1);
		auto sq = horizontal_lift(builtin_control(h, "square"), zero(*h), 400);
		c.at_most(std::abs(sq.x.back()[2] - 1), 1e-8, "|dz - 1|");
		c.at_most(std::abs(sq.x.back()[0]) + std::abs(sq.x.back()[1]), 1e-8, "square loop closes");
		c.expect(is_horizontal(sq, 1e-6).horizontal, "square lift horizontal");
		auto pb = horizontal_lift(builtin_control(h, "parabola"), zero(*h), 200);
		double err = 0;
		for (std::size_t k = 0; k < pb.t.size(); ++k) err = std::max(err, std::abs(pb.x[k][2] - std::pow(pb.t[k], 3) / 6));
		c.at_most(err, 1e-8, "max |z(s) - s^3/6|");
		c.expect(is_horizontal(pb, 1e-6).horizontal, "parabola lift horizontal");
		auto f = free_nilpotent(2, 3);
		auto cf = horizontal_lift(builtin_control(f, "circle"), zero(*f), 200);
		c.expect(is_horizontal(cf, 1e-6).horizontal, "circle lift in free_2_3 horizontal");
	});

	criterion(4, "pansu_quotient_order", 0, [](Checker& c) {
		std::vector<double> hs{1e-1, 1e-2, 1e-3, 1e-4};
		std::ostringstream note;
		note << "orders:";
		for (const auto& g : {heisenberg(1), heisenberg(2), free_nilpotent(2, 3)})
			for (const char* ctl : {"circle", "parabola"})
			{
				auto s = pansu_order(builtin_control(g, ctl), 0.3, hs);
				c.at_least(s.order, 1.0 - 0.01, g->name() + " " + ctl + " order");
				note << " " << g->name() << "/" << ctl << "=" << s.order;
			}
		c.note = note.str();
		auto h = heisenberg(1);
		QMatrix l = QMatrix::from_rows({qv({2, 1, 0}), qv({1, 1, 0}), qv({0, 0, 1})}, 3);
		auto lr = pansu_differential(linear_map(h, h, l), {1.0, 2.0, -0.5});
		c.expect(lr.homomorphism, "linear map is an h-homomorphism");
		for (double d : lr.defect) c.at_most(d, 1e-9, "h-homomorphism defect");
		auto dr = pansu_differential(dilation_map(h, Rational(3, 2)), {0.4, -0.2, 0.9});
		for (double d : dr.defect) c.at_most(d, 1e-9, "dilation defect");
		auto g42 = example_g42();
		QMatrix p = coordinate_map(*g42, {0, 1});
		auto pr = pansu_differential(linear_map(g42, abelian(2), p), {0.3, -0.1, 0.2, 0.5, 0.1, 0.2, -0.4});
		for (double d : pr.defect) c.at_most(d, 1e-9, "g42 projection defect");
	});

	criterion(5, "riemann_sum_limit", 0, [](Checker& c) {
		auto h = heisenberg(1);
		double s = 0.8;
		CurveFn par = [](double t) { return RVec{t, t * t, 0}; };
		CurveFn dpar = [](double t) { return RVec{1, 2 * t, 0}; };
		RVec lim = riemann_limit(*h, par, dpar, s);
		c.at_most(norm_inf(sub(lim, RVec{s, s * s, -s * s * s / 6})), 1e-6, "closed form error");
		std::vector<double> mesh, err;
		for (int n : {16, 32, 64, 128})
		{
			std::vector<double> part;
			for (int k = 0; k <= n; ++k) part.push_back(s * k / n);
			mesh.push_back(s / n);
			err.push_back(norm2(sub(group_riemann_sum(*h, par, part), lim)));
		}
		double order = fit_order(mesh, err);
		c.at_least(order, 1.0 - 0.01, "fitted order");
		for (std::size_t k = 0; k < mesh.size(); ++k) c.at_most(err[k] / mesh[k], err[0] / mesh[0] * 1.1, "err / mesh");
		std::ostringstream note;
		note << "order " << order << ", C = " << err[0] / mesh[0];
		c.note = note.str();
	});

	criterion(6, "classification_suite", 120, [](Checker& c) {
		auto h = heisenberg(1);
		auto r2 = abelian(2);
		auto e1 = classify_epimorphism(GradedMorphism(h, r2, coordinate_map(*h, {0, 1})));
		c.expect(e1.verdict == EpiVerdict::surjective_not_epi, "h1 -> R2 surjective_not_epi");
		auto g = example_g42();
		auto l1 = classify_epimorphism(GradedMorphism(g, r2, coordinate_map(*g, {0, 1})));
		c.expect(l1.verdict == EpiVerdict::h_epimorphism && l1.witness.has_value(), "L1 epi with witness");
		if (l1.witness)
		{
			c.expect(is_complementary(*l1.witness, l1.kernel), "L1 witness complementary to kernel");
			record_pair(*l1.witness, l1.kernel);
		}
		auto l2 = classify_epimorphism(GradedMorphism(g, r2, coordinate_map(*g, {2, 3})));
		c.expect(l2.verdict == EpiVerdict::surjective_not_epi, "L2 surjective_not_epi");
		auto center = find_complement(layered_decomposition(h, {qv({0, 0, 1})}));
		c.expect(center.verdict == EpiVerdict::surjective_not_epi && !center.certificate.empty(),
		         "no complement of the center in h1, with certificate");

		std::mt19937_64 rng(606);
		for (int n = 1; n <= 4; ++n)
		{
			auto hn = heisenberg(n);
			auto dim = static_cast<std::size_t>(hn->dim());
			std::uniform_int_distribution<int> kd(1, n);
			for (int t = 0; t < 50; ++t)
			{
				int k = kd(rng);
				Subspace n1(dim);
				while (static_cast<int>(n1.dim()) < 2 * n - k) n1 = n1.sum(Subspace::span(dim, {horizontal_q(rng, *hn)}));
				auto s = heisenberg_complement(hn, n1, static_cast<std::uint64_t>(t + 1));
				c.expect(is_commutative(s), "heisenberg_complement commutative");
				c.expect(s.layer_dim(1) == k && static_cast<int>(s.layer(1).sum(n1).dim()) == 2 * n,
				         "heisenberg_complement complements n1");
				std::vector<QVec> gens = n1.basis();
				gens.push_back(hn->basis_vector(2 * n));
				auto ideal = layered_decomposition(hn, gens);
				c.expect(is_complementary(s, ideal), "complement of n1 + center");
				record_pair(s, ideal);
			}
		}

		auto g21 = complexified_heisenberg();
		// commutative n1 and non-commutative n1
		for (auto n1 : {Subspace::span(6, {qv({0, 1, 0, 0, 0, 0}), qv({0, 0, 1, 0, 0, 0})}),
		                Subspace::span(6, {qv({1, 0, 0, 0, 0, 0}), qv({0, 1, 0, 0, 0, 0})})})
		{
			auto s = h21_complement(g21, n1);
			c.expect(is_commutative(s) && s.layer(1).sum(n1).dim() == 4u, "h21_complement");
			auto b = n1.basis();
			b.push_back(qv({0, 0, 0, 0, 1, 0}));
			b.push_back(qv({0, 0, 0, 0, 0, 1}));
			auto ideal = layered_decomposition(g21, b);
			c.expect(is_complementary(s, ideal), "h21 complement complementary");
			record_pair(s, ideal);
		}
	});

	criterion(7, "quotient_grading_qkp", 0, [](Checker& c) {
		std::mt19937_64 rng(707);
		for (int n = 1; n <= 4; ++n)
		{
			auto g = heisenberg(n);
			auto dim = static_cast<std::size_t>(g->dim());
			for (int k = 1; k <= n; ++k)
			{
				Subspace u(dim);
				while (static_cast<int>(u.dim()) < 2 * n - k) u = u.sum(Subspace::span(dim, {horizontal_q(rng, *g)}));
				std::vector<QVec> gens = u.basis();
				gens.push_back(g->basis_vector(2 * n));
				auto ideal = layered_decomposition(g, gens);
				Quotient q = quotient(ideal);
				c.expect(q.algebra->dim() == k && q.algebra->step() == 1 && q.algebra->canonical_brackets().empty(),
				         "quotient is abelian of dimension k");
				bool layers = true;
				for (int i = 0; i < q.algebra->dim(); ++i) layers = layers && q.algebra->layer_of(i) == 1;
				c.expect(layers, "quotient layers all 1");
				c.expect(q.projection.is_h_homomorphism() && q.projection.is_surjective(), "projection h-epimorphism");
				c.expect(homogeneous_dimension(*g) == homogeneous_dimension(ideal) + homogeneous_dimension(*q.algebra),
				         "Q(G) = Q(N) + Q(G/N)");
			}
		}
		for (int n = 1; n <= 3; ++n)
		{
			auto g = heisenberg(n);
			int found = 0;
			for (int t = 0; t < 5000 && found < 100; ++t)
				if (auto p = random_complementary_pair(g, rng))
				{
					++found;
					record_pair(p->first, p->second);
				}
		}
		c.at_least(qkp_checked, 300, "complementary pairs checked");
		c.expect(qkp_failed == 0, std::to_string(qkp_failed) + " pairs violate QKP");
	});

	criterion(8, "implicit_function_xi", 0, [](Checker& c) {
		auto m = example_level_map();
		HomogeneousMetric dm(m.domain, MetricKind::koranyi);
		auto s = implicit_function(m, xi, dm);
		c.expect(s.kernel.dim() == 3, "kernel dimension 3");
		c.at_least(static_cast<double>(s.nodes.size()), 21.0 * 21.0, "grid nodes");
		c.at_most(s.max_residual, 1e-8, "Newton residual");
		c.at_most(s.max_restart_gap, 1e-7, "restart gap");
		c.expect(std::isfinite(s.kappa) && s.kappa > 0, "kappa finite");
		c.expect(std::isfinite(s.holder_const), "Holder constant finite");
		double closed = 0;
		for (std::size_t k = 0; k < s.nodes.size(); ++k)
		{
			double n3 = s.nodes[k][2];
			closed = std::max({closed, std::abs(s.phi[k][3]), std::abs(1 + s.phi[k][1] - std::sqrt(1 - n3 * n3))});
		}
		c.at_most(closed, 1e-8, "closed-form graph error");
		std::ostringstream note;
		note << s.nodes.size() << " nodes, residual " << s.max_residual << ", restart gap " << s.max_restart_gap
		     << ", kappa " << s.kappa << ", holder " << s.holder_const;
		c.note = note.str();
	});

	criterion(9, "blowup_tangent_cone", 0, [](Checker& c) {
		auto m = example_level_map();
		HomogeneousMetric dm(m.domain, MetricKind::koranyi);
		std::ostringstream note;
		for (const auto& [tag, p] : {std::pair<std::string, RVec>{"xi", xi}, {"eta", eta}})
		{
			ImplicitOptions o;
			o.nodes = {5, 5, 3};
			o.holder = false;
			auto s = implicit_function(m, p, dm, o);
			auto sampler = implicit_blowup_sampler(m, s, dm, 1.0, 10000);
			auto rep = tangent_cone_samples(sampler, p, dm, {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}, 1.0);
			c.expect(rep.decreasing, tag + " distances decrease");
			c.at_most(rep.distance.back(), 0.05, tag + " final distance");
			note << tag << ":";
			for (double d : rep.distance) note << " " << d;
			note << "  ";
		}
		c.note = note.str();
		auto kx = kernel(pansu_morphism(m, xi));
		auto ke = kernel(pansu_morphism(m, eta));
		c.expect(kx.contains(qv({1, 0, 0, 0, 0})) && kx.contains(qv({0, 0, 1, 0, 0})) && kx.contains(qv({0, 0, 0, 0, 1})),
		         "kernel at xi");
		c.expect(bracket_rank(kx) == 0 && is_commutative(kx), "cone at xi commutative");
		c.expect(ke.contains(qv({1, 0, 0, 0, 0})) && ke.contains(qv({0, 1, 0, 0, 0})) && ke.contains(qv({0, 0, 0, 0, 1})),
		         "kernel at eta");
		c.expect(bracket_rank(ke) == 1, "cone at eta has bracket rank 1");
	});

	criterion(10, "mean_value_inequality", 0, [](Checker& c) {
		auto m = example_level_map();
		HomogeneousMetric dm(m.domain, MetricKind::koranyi), cm = default_metric(m.codomain);
		auto r = mean_value_ratio(m, dm, cm, xi, 0.1, 0.1, 4, 200);
		c.expect(r.bins.size() == 4, "4 bins");
		for (std::size_t k = 1; k < r.bins.size(); ++k)
			c.at_most(r.bins[k].sup, r.bins[k - 1].sup, "bin " + std::to_string(k) + " defect");
		c.at_most(r.last_over_first, 0.1, "last / first");
		std::ostringstream note;
		note << "bin sups:";
		for (const auto& b : r.bins) note << " " << b.sup;
		c.note = note.str();
	});

	criterion(11, "metric_estimates", 0, [](Checker& c) {
		std::ostringstream note;
		for (const char* name : {"h1", "h2_1"})
		{
			HomogeneousMetric m(catalog_by_name(name), MetricKind::koranyi);
			auto table = [&](std::size_t samples) {
				SampleOptions o{samples, 1, 1, 8};
				std::vector<EmpiricalConstant> out = verify_projection_estimate(m, 1.0, o);
				out.push_back(estimate_rhonormiota(m, 1.0, o));
				out.push_back(estimate_leftinveucl(m.algebra(), 1.0, o));
				auto [a, b] = verify_conjugation_estimate(m, 1.0, o);
				out.push_back(a);
				out.push_back(b);
				out.push_back(verify_product_estimate(m, 1.0, 2, o));
				return out;
			};
			auto t1 = table(2000), t2 = table(4000);
			double worst = 0;
			for (std::size_t i = 0; i < t1.size(); ++i)
			{
				c.expect(std::isfinite(t1[i].sup) && std::isfinite(t2[i].sup), std::string(name) + " " + t1[i].label + " finite");
				double d = rel_drift(t1[i].sup, t2[i].sup);
				worst = std::max(worst, d);
				c.at_most(d, 0.05, std::string(name) + " " + t1[i].label + " drift");
			}
			note << name << " max drift " << worst << "  ";
		}
		c.note = note.str();
	});

	criterion(12, "h_type_and_pairs", 0, [](Checker& c) {
		std::mt19937_64 rng(1212);
		auto g = complexified_heisenberg();
		std::vector<QVec> xs, zs;
		for (int t = 0; t < 20; ++t)
		{
			xs.push_back(random_q(rng, 4, 3));
			zs.push_back(random_q(rng, 2, 3));
		}
		auto hc = check_h_type(*g, xs, zs);
		c.expect(hc.ok, "complexified Heisenberg is H-type: " + hc.failure);
		for (int n = 1; n <= 3; ++n) c.expect(check_h_type(*heisenberg(n)).ok, "h" + std::to_string(n) + " is H-type");
		c.expect(!check_h_type(*example_g42()).ok, "g42 is not H-type");

		auto a = layered_decomposition(g, {qv({1, 0, 0, 0, 0, 0}), qv({0, 0, 0, 1, 0, 0}), qv({0, 0, 0, 0, 1, 0})});
		auto b = layered_decomposition(g, {qv({0, 1, 0, 0, 0, 0}), qv({0, 0, 1, 0, 0, 0}), qv({0, 0, 0, 0, 0, 1})});
		c.expect(is_complementary(a, b) && !is_ideal(a) && !is_ideal(b), "complementary pair with neither normal");
		record_pair(a, b);

		int hpairs = 0;
		for (int n = 1; n <= 3; ++n)
		{
			auto hn = heisenberg(n);
			for (int t = 0; t < 5000 && hpairs < 100 * n; ++t)
			{
				auto p = random_complementary_pair(hn, rng);
				if (!p) continue;
				++hpairs;
				auto ca = horizontal_vertical_classify(p->first), cb = horizontal_vertical_classify(p->second);
				c.expect((ca == HVClass::horizontal && cb == HVClass::vertical) ||
				             (ca == HVClass::vertical && cb == HVClass::horizontal),
				         "Heisenberg pair: one horizontal, one vertical");
				record_pair(p->first, p->second);
			}
		}
		c.at_least(hpairs, 300, "Heisenberg pairs");
		int normal = 0;
		for (int t = 0; t < 20000 && normal < 100; ++t)
		{
			auto p = random_complementary_pair(g, rng);
			if (!p || p->first.dim() == 0 || p->second.dim() == 0) continue;
			record_pair(p->first, p->second);
			for (int s = 0; s < 2; ++s)
			{
				const auto& nn = s == 0 ? p->first : p->second;
				const auto& hh = s == 0 ? p->second : p->first;
				if (!is_ideal(nn)) continue;
				++normal;
				c.expect(nn.layer_dim(2) == 2, "normal member contains the center");
				c.expect(horizontal_vertical_classify(hh) == HVClass::horizontal && is_commutative(hh),
				         "other member commutative horizontal");
			}
		}
		c.at_least(normal, 100, "h21 pairs with a normal member");
		c.expect(qkp_failed == 0, "QKP on all pairs");
		c.note = std::to_string(qkp_checked) + " complementary pairs checked for QKP in total";
	});

	std::printf("%s: %d of 12 criteria failed\n", failures ? "FAIL" : "PASS", failures);
	return failures ? 1 : 0;
}
