#pragma once

#include "carnot/graded_algebra.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace carnot {

// Dilation-invariant subalgebra stored as per-layer RREF bases.
class HomogeneousSubalgebra
{
public:
	HomogeneousSubalgebra(AlgebraPtr g, std::vector<Subspace> layers);

	const GradedAlgebra& algebra() const { return *g_; }
	AlgebraPtr algebra_ptr() const { return g_; }
	// Layer l (1-based) part, as a subspace of the whole algebra.
	const Subspace& layer(int l) const { return layers_[static_cast<std::size_t>(l - 1)]; }
	int layer_dim(int l) const { return static_cast<int>(layer(l).dim()); }
	int dim() const;
	std::vector<QVec> basis() const;
	Subspace space() const;
	bool contains(const QVec& v) const;
	bool operator==(const HomogeneousSubalgebra& o) const { return layers_ == o.layers_; }

private:
	AlgebraPtr g_;
	std::vector<Subspace> layers_;
};

class SubgroupError : public std::runtime_error
{
public:
	enum class Kind { not_homogeneous, not_subalgebra, not_ideal, hypothesis };
	SubgroupError(Kind k, const std::string& msg, QVec witness = {})
	    : std::runtime_error(msg), kind(k), witness(std::move(witness))
	{
	}
	Kind kind;
	QVec witness; // offending projection or bracket
};

// Throws SubgroupError(not_homogeneous) with the escaping layer projection,
// or SubgroupError(not_subalgebra) with the escaping bracket.
HomogeneousSubalgebra layered_decomposition(AlgebraPtr g, const std::vector<QVec>& span);
// Smallest subalgebra containing the given homogeneous vectors.
HomogeneousSubalgebra generated_subalgebra(AlgebraPtr g, const std::vector<QVec>& vectors);
HomogeneousSubalgebra whole_algebra(AlgebraPtr g);
HomogeneousSubalgebra zero_subalgebra(AlgebraPtr g);

bool is_ideal(const HomogeneousSubalgebra& a);
bool is_commutative(const HomogeneousSubalgebra& a);
bool is_complementary(const HomogeneousSubalgebra& a, const HomogeneousSubalgebra& b);
int homogeneous_dimension(const HomogeneousSubalgebra& a);

// Layer-preserving linear map, codomain x domain matrix.
class GradedMorphism
{
public:
	GradedMorphism(AlgebraPtr domain, AlgebraPtr codomain, QMatrix matrix);

	const GradedAlgebra& domain() const { return *dom_; }
	const GradedAlgebra& codomain() const { return *cod_; }
	AlgebraPtr domain_ptr() const { return dom_; }
	AlgebraPtr codomain_ptr() const { return cod_; }
	const QMatrix& matrix() const { return m_; }
	QVec apply(const QVec& x) const { return m_.apply(x); }
	RVec apply(const RVec& x) const;

	bool is_lie_hom() const { return lie_; }
	bool is_layer_preserving() const { return layered_; }
	bool is_h_homomorphism() const { return lie_ && layered_; }
	bool is_surjective() const { return surj_; }
	bool is_injective() const { return inj_; }

private:
	AlgebraPtr dom_, cod_;
	QMatrix m_;
	bool lie_ = false, layered_ = false, surj_ = false, inj_ = false;
};

struct HomReport
{
	bool is_lie_hom, is_layer_preserving, is_h_homomorphism, is_surjective, is_injective;
	std::vector<std::string> failures; // first few violations, 1-based indices
};

HomReport check_h_homomorphism(const GradedMorphism& l);

HomogeneousSubalgebra kernel(const GradedMorphism& l);
HomogeneousSubalgebra image(const GradedMorphism& l);

struct Quotient
{
	AlgebraPtr algebra;
	GradedMorphism projection;
	std::vector<QVec> representatives; // preimages of the quotient basis
};

// Quotient basis is taken from standard basis vectors completing each layer
// of the ideal, so the quotient keeps their names.
Quotient quotient(const HomogeneousSubalgebra& ideal);

enum class EpiVerdict { h_epimorphism, surjective_not_epi, not_surjective, undecided };
std::string to_string(EpiVerdict v);

struct EpiClassification
{
	EpiVerdict verdict = EpiVerdict::undecided;
	HomogeneousSubalgebra kernel;
	std::optional<HomogeneousSubalgebra> witness; // complement of the kernel
	std::string certificate;                      // reason for nonexistence, or exhaustion note
	std::string method;                           // which tier decided
	std::size_t trials = 0;
};

struct SearchOptions
{
	std::uint64_t seed = 1;
	std::size_t budget = 10000;
};

// h-homomorphic right inverse of l through a complement h of its kernel:
// the inverse of the restriction l|h.
GradedMorphism right_inverse(const GradedMorphism& l, const HomogeneousSubalgebra& h);

// Throws std::invalid_argument if l is not an h-homomorphism.
EpiClassification classify_epimorphism(const GradedMorphism& l, const SearchOptions& opt = {});

// Complement of a homogeneous ideal n inside g (the decision part of
// classify_epimorphism).
EpiClassification find_complement(const HomogeneousSubalgebra& n, const SearchOptions& opt = {});

enum class MonoVerdict { h_monomorphism, injective_not_mono, not_injective, undecided };
std::string to_string(MonoVerdict v);

struct MonoClassification
{
	MonoVerdict verdict = MonoVerdict::undecided;
	HomogeneousSubalgebra image;
	std::optional<HomogeneousSubalgebra> normal_complement;
	std::optional<GradedMorphism> projection; // codomain -> codomain, identity on the image
	std::string certificate, method;
	std::size_t trials = 0;
};

MonoClassification classify_monomorphism(const GradedMorphism& t, const SearchOptions& opt = {});

// Commutative horizontal complement of n1 in the first layer of an H-type
// algebra with one-dimensional center (h^n), following the symplectic basis
// construction. Exact; throws SubgroupError(hypothesis) on bad input.
HomogeneousSubalgebra heisenberg_complement(AlgebraPtr g, const Subspace& n1, std::uint64_t seed = 1);
// Commutative complement of n = n1 + z in the complexified Heisenberg algebra.
HomogeneousSubalgebra h21_complement(AlgebraPtr g, const Subspace& n1);

enum class HVClass { horizontal, vertical, neither };
std::string to_string(HVClass c);
HVClass horizontal_vertical_classify(const HomogeneousSubalgebra& a);

struct CommutativeDim
{
	int dim = 0;
	bool exact = false;
	std::vector<QVec> witness;
	std::string method;
};

constexpr int kCommutativeSearchMaxDim = 8;
CommutativeDim max_commutative_horizontal_dim(AlgebraPtr g, const SearchOptions& opt = {});

// Homogeneous dimensions of a complementary pair add up to that of the group.
bool check_qkp(const HomogeneousSubalgebra& a, const HomogeneousSubalgebra& b);

// x = p o h with p in exp(a), h in exp(b); exact, layer by layer.
std::pair<QVec, QVec> split(const HomogeneousSubalgebra& a, const HomogeneousSubalgebra& b, const QVec& x);

struct ProductMembership
{
	bool member = false;
	double residual = 0;
	RVec a, b; // exponential coordinates of the factors
};

// Numerical test of x in exp(a) exp(b) for arbitrary subspaces (not
// necessarily complementary): damped Gauss-Newton with seeded restarts,
// factor coordinates confined to [-bound, bound].
ProductMembership product_set_membership(const GradedAlgebra& g, const std::vector<QVec>& a,
                                         const std::vector<QVec>& b, const RVec& x, std::uint64_t seed = 1,
                                         int restarts = 20, double tol = 1e-10, double bound = 100);

// Random complementary pair (a, b) of homogeneous subalgebras for step-2
// algebras; nullopt when the draw fails to produce one.
std::optional<std::pair<HomogeneousSubalgebra, HomogeneousSubalgebra>> random_complementary_pair(AlgebraPtr g,
                                                                                                 std::mt19937_64& rng);

} // namespace carnot
