#include "carnot/bch.hpp"
#include "carnot/catalog.hpp"
#include "carnot/subgroups.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace carnot;

namespace {

QVec e(const GradedAlgebra& g, int i) { return g.basis_vector(i); }

QVec comb(const GradedAlgebra& g, std::initializer_list<std::pair<int, Rational>> terms)
{
	QVec v(static_cast<std::size_t>(g.dim()));
	for (const auto& [i, c] : terms) v[static_cast<std::size_t>(i)] += c;
	return v;
}

QMatrix coordinate_map(const GradedAlgebra& g, std::vector<int> rows)
{
	QMatrix m(rows.size(), static_cast<std::size_t>(g.dim()));
	for (std::size_t r = 0; r < rows.size(); ++r) m(r, static_cast<std::size_t>(rows[r])) = 1;
	return m;
}

QVec random_q(std::mt19937_64& rng, std::size_t n, int lo = -3, int hi = 3)
{
	std::uniform_int_distribution<int> d(lo, hi);
	QVec v(n);
	for (auto& c : v) c = d(rng);
	return v;
}

} // namespace

TEST(Subalgebra, LayeredDecomposition)
{
	auto h = heisenberg(1); // X Y Z
	try
	{
		layered_decomposition(h, {comb(*h, {{0, 1}, {2, 1}})});
		FAIL();
	}
	catch (const SubgroupError& err)
	{
		EXPECT_EQ(err.kind, SubgroupError::Kind::not_homogeneous);
	}
	auto xz = layered_decomposition(h, {e(*h, 0), e(*h, 2)});
	EXPECT_EQ(xz.layer(1), Subspace::span(3, {e(*h, 0)}));
	EXPECT_EQ(xz.layer(2), Subspace::span(3, {e(*h, 2)}));
	try
	{
		layered_decomposition(h, {e(*h, 0), e(*h, 1)});
		FAIL();
	}
	catch (const SubgroupError& err)
	{
		EXPECT_EQ(err.kind, SubgroupError::Kind::not_subalgebra);
		EXPECT_EQ(err.witness, e(*h, 2));
	}
}

TEST(Subalgebra, Ideals)
{
	auto h = heisenberg(1);
	EXPECT_TRUE(is_ideal(layered_decomposition(h, {e(*h, 2)})));
	EXPECT_TRUE(is_ideal(layered_decomposition(h, {e(*h, 0), e(*h, 2)})));
	EXPECT_FALSE(is_ideal(layered_decomposition(h, {e(*h, 0)})));
	EXPECT_TRUE(is_ideal(whole_algebra(h)));
}

TEST(Subalgebra, Complementary)
{
	auto h = heisenberg(1);
	auto s = layered_decomposition(h, {e(*h, 1), e(*h, 2)});
	for (Rational lam : {Rational(0), Rational(1), Rational(-7, 3), Rational(5)})
	{
		auto a = layered_decomposition(h, {comb(*h, {{0, 1}, {1, lam}})});
		EXPECT_TRUE(is_complementary(a, s));
		EXPECT_TRUE(check_qkp(a, s));
		EXPECT_EQ(horizontal_vertical_classify(a), HVClass::horizontal);
	}
	EXPECT_EQ(horizontal_vertical_classify(s), HVClass::vertical);
	EXPECT_FALSE(is_complementary(layered_decomposition(h, {e(*h, 0), e(*h, 2)}), s));

	auto g = example_g42();
	auto n = layered_decomposition(g, {e(*g, 2), e(*g, 3), e(*g, 4), e(*g, 5), e(*g, 6)});
	EXPECT_TRUE(is_complementary(layered_decomposition(g, {e(*g, 0), e(*g, 1)}), n));
}

TEST(Subalgebra, Quotients)
{
	auto h = heisenberg(1);
	Quotient q = quotient(layered_decomposition(h, {e(*h, 2)}));
	EXPECT_EQ(q.algebra->dim(), 2);
	EXPECT_EQ(q.algebra->step(), 1);
	EXPECT_TRUE(q.projection.is_h_homomorphism());
	EXPECT_TRUE(q.projection.is_surjective());
	EXPECT_THROW(quotient(layered_decomposition(h, {e(*h, 0)})), SubgroupError);

	std::mt19937_64 rng(3);
	for (int n = 1; n <= 3; ++n)
	{
		auto g = heisenberg(n);
		for (int k = 1; k <= n; ++k)
		{
			// random u of codim k in V1, plus the center
			std::vector<QVec> gens;
			Subspace u(static_cast<std::size_t>(g->dim()));
			while (static_cast<int>(u.dim()) < 2 * n - k)
			{
				QVec v = random_q(rng, static_cast<std::size_t>(g->dim()));
				v.back() = 0;
				u = u.sum(Subspace::span(u.ambient(), {v}));
			}
			gens = u.basis();
			gens.push_back(e(*g, 2 * n));
			Quotient qq = quotient(layered_decomposition(g, gens));
			EXPECT_EQ(qq.algebra->dim(), k);
			EXPECT_EQ(qq.algebra->step(), 1);
			for (int t = 0; t < 5; ++t)
			{
				QVec x = random_q(rng, static_cast<std::size_t>(g->dim()));
				Rational r(3, 2);
				EXPECT_EQ(qq.projection.apply(dilate(*g, x, r)), dilate(*qq.algebra, qq.projection.apply(x), r));
			}
		}
	}
}

TEST(Morphism, HomomorphismChecks)
{
	auto h = heisenberg(1);
	auto r2 = abelian(2);
	GradedMorphism zero(h, r2, QMatrix(2, 3));
	EXPECT_TRUE(zero.is_h_homomorphism());
	GradedMorphism l(h, r2, coordinate_map(*h, {0, 1}));
	EXPECT_TRUE(l.is_h_homomorphism());
	EXPECT_TRUE(l.is_surjective());
	QMatrix swap(3, 3);
	swap(0, 2) = swap(2, 0) = swap(1, 1) = 1;
	GradedMorphism sw(h, h, swap);
	EXPECT_FALSE(sw.is_layer_preserving());
	EXPECT_FALSE(check_h_homomorphism(sw).failures.empty());
}

TEST(Morphism, EpimorphismClassification)
{
	auto h = heisenberg(1);
	auto r2 = abelian(2);
	auto c = classify_epimorphism(GradedMorphism(h, r2, coordinate_map(*h, {0, 1})));
	EXPECT_EQ(c.verdict, EpiVerdict::surjective_not_epi);
	EXPECT_FALSE(c.certificate.empty());

	auto g = example_g42();
	auto c1 = classify_epimorphism(GradedMorphism(g, r2, coordinate_map(*g, {0, 1})));
	ASSERT_EQ(c1.verdict, EpiVerdict::h_epimorphism);
	EXPECT_EQ(*c1.witness, layered_decomposition(g, {e(*g, 0), e(*g, 1)}));
	EXPECT_TRUE(is_complementary(*c1.witness, c1.kernel));

	auto c2 = classify_epimorphism(GradedMorphism(g, r2, coordinate_map(*g, {2, 3})));
	EXPECT_EQ(c2.verdict, EpiVerdict::surjective_not_epi);
	EXPECT_EQ(c2.method, "step2_certificate");

	auto c3 = classify_epimorphism(GradedMorphism(h, abelian(3), QMatrix(3, 3)));
	EXPECT_EQ(c3.verdict, EpiVerdict::not_surjective);
}

TEST(Morphism, EpiWitnessGivesSection)
{
	std::mt19937_64 rng(11);
	for (int n = 1; n <= 3; ++n)
	{
		auto g = heisenberg(n);
		for (int k = 1; k <= n; ++k)
			for (int t = 0; t < 3; ++t)
			{
				// l: h^n -> R^k given by a random rank-k first-layer matrix
				QMatrix m(static_cast<std::size_t>(k), static_cast<std::size_t>(g->dim()));
				do
				{
					for (int r = 0; r < k; ++r)
						for (int cidx = 0; cidx < 2 * n; ++cidx)
							m(static_cast<std::size_t>(r), static_cast<std::size_t>(cidx)) = random_q(rng, 1)[0];
				} while (static_cast<int>(rank(m)) < k);
				GradedMorphism l(g, abelian(k), m);
				auto c = classify_epimorphism(l);
				ASSERT_EQ(c.verdict, EpiVerdict::h_epimorphism);
				GradedMorphism s = right_inverse(l, *c.witness);
				EXPECT_EQ(l.matrix() * s.matrix(), QMatrix::identity(static_cast<std::size_t>(k)));
				EXPECT_TRUE(s.is_h_homomorphism());
			}
	}
}

TEST(Morphism, MonomorphismClassification)
{
	auto h = heisenberg(1);
	QMatrix tx(3, 1);
	tx(0, 0) = 1;
	auto m = classify_monomorphism(GradedMorphism(abelian(1), h, tx));
	ASSERT_EQ(m.verdict, MonoVerdict::h_monomorphism);
	EXPECT_EQ(*m.normal_complement, layered_decomposition(h, {e(*h, 1), e(*h, 2)}));
	EXPECT_TRUE(m.projection->is_h_homomorphism());
	EXPECT_EQ(m.projection->apply(e(*h, 0)), e(*h, 0));

	auto id = classify_monomorphism(GradedMorphism(h, h, QMatrix::identity(3)));
	ASSERT_EQ(id.verdict, MonoVerdict::h_monomorphism);
	EXPECT_EQ(id.normal_complement->dim(), 0);

	// commutative horizontal R^2 in h^2
	auto h2 = heisenberg(2);
	QMatrix t2(5, 2);
	t2(0, 0) = 1;
	t2(2, 1) = 1;
	EXPECT_EQ(classify_monomorphism(GradedMorphism(abelian(2), h2, t2)).verdict, MonoVerdict::h_monomorphism);

	EXPECT_EQ(classify_monomorphism(GradedMorphism(abelian(2), h, QMatrix(3, 2))).verdict, MonoVerdict::not_injective);
}

TEST(Complement, HeisenbergExamples)
{
	auto h = heisenberg(1);
	auto s = heisenberg_complement(h, Subspace::span(3, {e(*h, 1)}));
	EXPECT_EQ(s.layer(1), Subspace::span(3, {e(*h, 0)}));
	auto h2 = heisenberg(2); // X1 Y1 X2 Y2 Z
	auto s2 = heisenberg_complement(h2, Subspace::span(5, {e(*h2, 1), e(*h2, 3)}));
	EXPECT_TRUE(is_commutative(s2));
	EXPECT_EQ(s2.dim(), 2);
	// n1 = span{X1, X2 + Y1} is not isotropic and not J-invariant
	Subspace n1 = Subspace::span(5, {e(*h2, 0), comb(*h2, {{2, 1}, {1, 1}})});
	auto s3 = heisenberg_complement(h2, n1);
	EXPECT_TRUE(is_commutative(s3));
	EXPECT_EQ(s3.layer(1).sum(n1).dim(), 4u);
}

TEST(Complement, HeisenbergRandom)
{
	std::mt19937_64 rng(5);
	for (int n = 1; n <= 4; ++n)
	{
		auto g = heisenberg(n);
		std::size_t dim = static_cast<std::size_t>(g->dim());
		std::uniform_int_distribution<int> kd(1, n);
		for (int t = 0; t < 50; ++t)
		{
			int k = kd(rng);
			Subspace n1(dim);
			while (static_cast<int>(n1.dim()) < 2 * n - k)
			{
				QVec v = random_q(rng, dim, -2, 2);
				v.back() = 0;
				n1 = n1.sum(Subspace::span(dim, {v}));
			}
			auto s = heisenberg_complement(g, n1, static_cast<std::uint64_t>(t + 1));
			EXPECT_TRUE(is_commutative(s));
			EXPECT_EQ(s.layer_dim(1), k);
			EXPECT_EQ(static_cast<int>(s.layer(1).sum(n1).dim()), 2 * n);
		}
	}
}

TEST(Complement, H21Cases)
{
	auto g = complexified_heisenberg(); // R0 R1 R2 R3 Z1 Z2
	auto s = h21_complement(g, Subspace::span(6, {e(*g, 1), e(*g, 2)}));
	EXPECT_TRUE(is_commutative(s));
	EXPECT_EQ(s.layer(1), Subspace::span(6, {e(*g, 0), e(*g, 3)}));
	// non-commutative n1
	auto s2 = h21_complement(g, Subspace::span(6, {e(*g, 0), e(*g, 1)}));
	EXPECT_TRUE(is_commutative(s2));
	std::mt19937_64 rng(7);
	int noncomm = 0;
	while (noncomm < 20)
	{
		QVec x = random_q(rng, 6, -2, 2), y = random_q(rng, 6, -2, 2);
		x[4] = x[5] = y[4] = y[5] = 0;
		Subspace n1 = Subspace::span(6, {x, y});
		if (n1.dim() != 2 || is_zero_vector(g->bracket(x, y))) continue;
		++noncomm;
		auto h = h21_complement(g, n1);
		EXPECT_TRUE(is_commutative(h));
		EXPECT_EQ(h.layer(1).sum(n1).dim(), 4u);
	}
}

TEST(Complement, MaxCommutativeDim)
{
	for (int n = 1; n <= 4; ++n)
	{
		auto c = max_commutative_horizontal_dim(heisenberg(n));
		EXPECT_EQ(c.dim, n);
		EXPECT_TRUE(c.exact);
	}
	auto c = max_commutative_horizontal_dim(complexified_heisenberg());
	EXPECT_EQ(c.dim, 2);
	EXPECT_TRUE(c.exact);
	auto r = max_commutative_horizontal_dim(abelian(3));
	EXPECT_EQ(r.dim, 3);
}

TEST(Complement, H21NonHorizontalPair)
{
	auto g = complexified_heisenberg();
	auto a = layered_decomposition(g, {e(*g, 0), e(*g, 3), e(*g, 4)});
	auto b = layered_decomposition(g, {e(*g, 1), e(*g, 2), e(*g, 5)});
	EXPECT_TRUE(is_complementary(a, b));
	EXPECT_FALSE(is_ideal(a));
	EXPECT_FALSE(is_ideal(b));
}

TEST(Complement, RandomPairsProperties)
{
	// Heisenberg groups: one member horizontal, the other vertical.
	std::mt19937_64 rng(17);
	for (int n = 1; n <= 3; ++n)
	{
		auto g = heisenberg(n);
		int found = 0;
		for (int t = 0; t < 5000 && found < 100; ++t)
		{
			auto p = random_complementary_pair(g, rng);
			if (!p) continue;
			++found;
			auto ca = horizontal_vertical_classify(p->first), cb = horizontal_vertical_classify(p->second);
			EXPECT_TRUE((ca == HVClass::horizontal && cb == HVClass::vertical) ||
			            (ca == HVClass::vertical && cb == HVClass::horizontal));
			EXPECT_TRUE(check_qkp(p->first, p->second));
		}
		EXPECT_GE(found, 100);
	}
	// Complexified Heisenberg: a normal member contains the center, the other is commutative horizontal.
	auto g = complexified_heisenberg();
	int normal = 0;
	for (int t = 0; t < 20000 && normal < 100; ++t)
	{
		auto p = random_complementary_pair(g, rng);
		if (!p || p->first.dim() == 0 || p->second.dim() == 0) continue;
		for (int s = 0; s < 2; ++s)
		{
			const auto& nn = s == 0 ? p->first : p->second;
			const auto& hh = s == 0 ? p->second : p->first;
			if (!is_ideal(nn)) continue;
			++normal;
			EXPECT_EQ(nn.layer_dim(2), 2);
			EXPECT_EQ(horizontal_vertical_classify(hh), HVClass::horizontal);
			EXPECT_TRUE(is_commutative(hh));
		}
	}
	EXPECT_GE(normal, 100);
}

TEST(Splitting, SplitRecombine)
{
	std::mt19937_64 rng(23);
	for (const auto& g : {heisenberg(1), heisenberg(2), complexified_heisenberg(), example_g42()})
		for (int t = 0; t < 30; ++t)
		{
			auto p = random_complementary_pair(g, rng);
			if (!p) continue;
			QVec x = random_q(rng, static_cast<std::size_t>(g->dim()));
			auto [a, b] = split(p->first, p->second, x);
			EXPECT_TRUE(p->first.contains(a));
			EXPECT_TRUE(p->second.contains(b));
			EXPECT_EQ(group_product(*g, a, b), x);
			EXPECT_EQ(split(p->first, p->second, x), std::make_pair(a, b));
		}
}

TEST(Splitting, ProductSetMembership)
{
	auto g = heisenberg(2); // X1 Y1 X2 Y2 Z
	std::vector<QVec> a{e(*g, 0), e(*g, 2), comb(*g, {{4, 1}, {1, 1}})};
	std::vector<QVec> b{e(*g, 1), e(*g, 3)};
	RVec x{2, 0, 0, 0, 1};
	auto r = product_set_membership(*g, a, b, x);
	EXPECT_FALSE(r.member);
	EXPECT_GT(r.residual, 1e-6);
	// a point of the product set
	RVec pa{1, 0.5, 0, 0, 0.5}, pb{0, 0, 0, 2, 0};
	auto r2 = product_set_membership(*g, a, b, group_product(*g, pa, pb));
	EXPECT_TRUE(r2.member);
}
