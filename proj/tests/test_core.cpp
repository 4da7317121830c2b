#include "carnot/bch.hpp"
#include "carnot/catalog.hpp"
#include "carnot/free_lie.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace carnot;

namespace {

QVec random_q(std::mt19937_64& rng, int n, int range = 5)
{
	std::uniform_int_distribution<int> num(-range, range), den(1, 4);
	QVec v(static_cast<std::size_t>(n));
	for (auto& c : v)
	{
		c = Rational(num(rng), den(rng));
		c.canonicalize();
	}
	return v;
}

} // namespace

TEST(Rational, Parse)
{
	EXPECT_EQ(parse_rational("3/4"), Rational(3, 4));
	EXPECT_EQ(parse_rational("-2"), Rational(-2));
	EXPECT_EQ(parse_rational("0.25"), Rational(1, 4));
	EXPECT_THROW(parse_rational("x"), std::invalid_argument);
}

TEST(Linalg, NullspaceAndSolve)
{
	QMatrix a = QMatrix::from_rows({{1, 2, 3}, {2, 4, 6}}, 3);
	EXPECT_EQ(rank(a), 1u);
	auto ns = nullspace(a);
	ASSERT_EQ(ns.size(), 2u);
	for (const auto& v : ns) EXPECT_TRUE(is_zero_vector(a.apply(v)));
	EXPECT_FALSE(solve(a, QVec{1, 1}).has_value());
	auto x = solve(a, QVec{2, 4});
	ASSERT_TRUE(x);
	EXPECT_EQ(a.apply(*x), (QVec{2, 4}));
}

TEST(Linalg, SubspaceOps)
{
	Subspace u = Subspace::span(3, {{1, 0, 0}, {0, 1, 0}});
	Subspace v = Subspace::span(3, {{0, 1, 0}, {0, 0, 1}});
	EXPECT_EQ(u.intersect(v).dim(), 1u);
	EXPECT_EQ(u.sum(v).dim(), 3u);
	EXPECT_TRUE(u.contains(QVec{2, 3, 0}));
	EXPECT_FALSE(u.contains(QVec{0, 0, 1}));
}

TEST(Hall, WittCounts)
{
	for (int p = 2; p <= 3; ++p)
		for (int d = 1; d <= 4; ++d)
		{
			const HallBasis& hb = hall_basis(p, d);
			long long expect = 0;
			for (int n = 1; n <= d; ++n) expect += witt_dimension(p, n);
			EXPECT_EQ(hb.size(), expect) << p << " " << d;
			EXPECT_TRUE(validate_grading(hb.algebra()).empty());
			EXPECT_TRUE(is_stratified(hb.algebra()));
		}
	EXPECT_EQ(witt_dimension(2, 5), 6);
	EXPECT_EQ(witt_dimension(3, 3), 8);
}

TEST(Bch, KCoefficients)
{
	EXPECT_EQ(bernoulli(1), Rational(-1, 2));
	EXPECT_EQ(bernoulli(2), Rational(1, 6));
	EXPECT_EQ(bernoulli(4), Rational(-1, 30));
	EXPECT_EQ(bch_k_coefficient(2), Rational(1, 12));
	EXPECT_EQ(bch_k_coefficient(4), Rational(-1, 720));
}

TEST(Bch, C2C3InFreeAlgebra)
{
	const GradedAlgebra& f = hall_basis(2, 3).algebra();
	QVec x = f.basis_vector(0), y = f.basis_vector(1);
	QVec xy = f.bracket(x, y);
	auto c = bch_terms_recursive<Rational>(f, x, y, 3);
	EXPECT_EQ(c[2], scale(Rational(1, 2), xy));
	// c_3 = (1/12)([X,[X,Y]] - [Y,[X,Y]])
	QVec expect = scale(Rational(1, 12), sub(f.bracket(x, xy), f.bracket(y, xy)));
	EXPECT_EQ(c[3], expect);
}

TEST(Bch, RecursionMatchesSeriesOracle)
{
	std::mt19937_64 rng(11);
	for (int step = 1; step <= 6; ++step)
	{
		const GradedAlgebra& f = hall_basis(2, step).algebra();
		EXPECT_EQ(BchTermCache::for_step(step).product(),
		          series_oracle_product(f, f.basis_vector(0), f.basis_vector(1)))
		    << "step " << step;
	}
	for (const char* name : {"h1", "h2", "h2_1", "g42", "free_3_3"})
	{
		AlgebraPtr g = catalog_by_name(name);
		for (int t = 0; t < 10; ++t)
		{
			QVec x = random_q(rng, g->dim()), y = random_q(rng, g->dim());
			EXPECT_EQ(group_product(*g, x, y), series_oracle_product(*g, x, y)) << name;
		}
	}
}

TEST(Bch, MatrixModelOracle)
{
	std::mt19937_64 rng(5);
	for (int n = 1; n <= 3; ++n)
	{
		AlgebraPtr g = heisenberg(n);
		HeisenbergMatrixModel mm(n);
		for (int t = 0; t < 20; ++t)
		{
			QVec x = random_q(rng, g->dim()), y = random_q(rng, g->dim());
			EXPECT_EQ(group_product(*g, x, y), mm.product(x, y));
		}
	}
}

TEST(Bch, GroupLaws)
{
	std::mt19937_64 rng(7);
	AlgebraPtr g = free_nilpotent(2, 4);
	for (int t = 0; t < 10; ++t)
	{
		QVec x = random_q(rng, g->dim()), y = random_q(rng, g->dim()), z = random_q(rng, g->dim());
		EXPECT_EQ(group_product(*g, group_product(*g, x, y), z), group_product(*g, x, group_product(*g, y, z)));
		EXPECT_TRUE(is_zero_vector(group_product(*g, x, group_inverse(x))));
		Rational r(3, 2);
		EXPECT_EQ(dilate(*g, group_product(*g, x, y), r),
		          group_product(*g, dilate(*g, x, r), dilate(*g, y, r)));
	}
}

TEST(Bch, OutOfRange)
{
	AlgebraPtr g = heisenberg(1);
	QVec x(3);
	EXPECT_THROW(bch_term(*g, 3, x, x), std::out_of_range);
	EXPECT_THROW(series_oracle_product(*g, x, x, 1), std::invalid_argument);
}

TEST(Bch, DecomposeCn)
{
	for (int n = 2; n <= 6; ++n)
	{
		LnDecomposition d = decompose_cn(n);
		const GradedAlgebra& f = hall_basis(2, n).algebra();
		QVec a1 = f.basis_vector(0), a2 = f.basis_vector(1);
		EXPECT_EQ(evaluate_decomposition(f, d, a1, a2), BchTermCache::for_step(n).term(n)) << n;
	}
	LnDecomposition d2 = decompose_cn(2);
	EXPECT_EQ(d2.coefficients, (std::vector<Rational>{Rational(1, 2), 0}));
}

TEST(Bch, ExpDifferentialH1)
{
	AlgebraPtr g = heisenberg(1);
	QVec x{1, 0, 0}, y{0, 1, 0};
	EXPECT_EQ(exp_differential_apply(*g, x, y), (QVec{0, 1, Rational(-1, 2)}));
}

TEST(Bch, RemainderStep2Vanishes)
{
	std::mt19937_64 rng(3);
	AlgebraPtr g = heisenberg(2);
	QVec x = random_q(rng, g->dim()), y = random_q(rng, g->dim());
	EXPECT_TRUE(is_zero_vector(cn_remainder(*g, 2, x, y)));
}

TEST(Catalog, Validate)
{
	for (const auto& name : catalog_names())
	{
		AlgebraPtr g = catalog_by_name(name);
		EXPECT_TRUE(validate_grading(*g).empty()) << name;
		EXPECT_TRUE(is_stratified(*g)) << name;
	}
	EXPECT_EQ(homogeneous_dimension(*heisenberg(2)), 6);
	EXPECT_THROW(catalog_by_name("nope"), std::invalid_argument);
}

TEST(Catalog, HType)
{
	EXPECT_TRUE(check_h_type(*heisenberg(3)).ok);
	EXPECT_TRUE(check_h_type(*complexified_heisenberg()).ok);
	EXPECT_FALSE(check_h_type(*example_g42()).ok);
	HTypeData d = j_from_algebra(*complexified_heisenberg());
	EXPECT_EQ(d.j[0].apply(QVec{0, 1, 0, 0}), (QVec{-1, 0, 0, 0}));
	EXPECT_EQ(d.j[1].apply(QVec{0, 1, 0, 0}), (QVec{0, 0, 0, -1}));
	AlgebraPtr back = h_type_from_j(d);
	EXPECT_EQ(back->canonical_brackets().size(), complexified_heisenberg()->canonical_brackets().size());

	HTypeData bad;
	bad.m = 2;
	bad.j.push_back(QMatrix::from_rows({{0, -2}, {2, 0}}, 2));
	EXPECT_THROW(h_type_from_j(bad), std::invalid_argument);
}

TEST(Catalog, DirectProduct)
{
	AlgebraPtr p = direct_product(*heisenberg(1), *abelian(2));
	EXPECT_EQ(p->dim(), 5);
	EXPECT_TRUE(p->layers_sorted());
	EXPECT_TRUE(validate_grading(*p).empty());
	EXPECT_EQ(p->basis_names()[4], "a.Z");
}
