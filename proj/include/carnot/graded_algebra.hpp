#pragma once

#include "carnot/linalg.hpp"

#include <memory>
#include <string>
#include <vector>

namespace carnot {

struct StructureTerm
{
	int k;
	Rational c;
};

// One row of the structure-constant table: [b_i, b_j] = sum c b_k (0-based).
struct BracketEntry
{
	int i, j;
	std::vector<StructureTerm> terms;
};

// Finite-dimensional graded Lie algebra in a fixed basis. Layers are numbered
// from 1; the basis is expected to be sorted by layer.
//
// Entries are taken as given: an entry (i,j) fills [b_i,b_j], and [b_j,b_i]
// is derived by antisymmetry unless the table lists it too. Inconsistent
// tables are kept so that validate_grading can point at them.
class GradedAlgebra
{
public:
	GradedAlgebra(std::string name, std::vector<int> layer_of, std::vector<std::string> basis_names,
	              std::vector<BracketEntry> brackets);

	const std::string& name() const { return name_; }
	int dim() const { return static_cast<int>(layer_of_.size()); }
	int step() const { return step_; }
	int layer_of(int i) const { return layer_of_[static_cast<std::size_t>(i)]; }
	const std::vector<int>& layers() const { return layer_of_; }
	int layer_dim(int layer) const;
	std::vector<int> layer_indices(int layer) const;
	const std::vector<std::string>& basis_names() const { return names_; }
	const std::vector<BracketEntry>& raw_brackets() const { return raw_; }
	bool layers_sorted() const;

	// Full table entry for [b_i, b_j].
	const std::vector<StructureTerm>& terms(int i, int j) const
	{
		return table_[static_cast<std::size_t>(i * dim() + j)];
	}

	// Canonical i<j entries with zero terms dropped.
	std::vector<BracketEntry> canonical_brackets() const;

	template <class T>
	std::vector<T> bracket(const std::vector<T>& x, const std::vector<T>& y) const;

	QVec basis_vector(int i) const;

private:
	struct Triple
	{
		int j, k;
		Rational c;
		double cd;
	};

	const Rational& coef(const Triple& t, const Rational*) const { return t.c; }
	double coef(const Triple& t, const double*) const { return t.cd; }

	std::string name_;
	std::vector<int> layer_of_;
	std::vector<std::string> names_;
	std::vector<BracketEntry> raw_;
	int step_ = 0;
	std::vector<std::vector<StructureTerm>> table_;
	std::vector<std::vector<Triple>> by_first_; // nonzero products grouped by i
};

using AlgebraPtr = std::shared_ptr<const GradedAlgebra>;

template <class T>
std::vector<T> GradedAlgebra::bracket(const std::vector<T>& x, const std::vector<T>& y) const
{
	std::vector<T> r(static_cast<std::size_t>(dim()), T(0));
	for (std::size_t i = 0; i < by_first_.size(); ++i)
	{
		if (is_zero(x[i])) continue;
		for (const auto& t : by_first_[i])
		{
			const T& yj = y[static_cast<std::size_t>(t.j)];
			if (is_zero(yj)) continue;
			r[static_cast<std::size_t>(t.k)] += coef(t, static_cast<const T*>(nullptr)) * x[i] * yj;
		}
	}
	return r;
}

// [X,Y]_k = [X,[X,...,[X,Y]]] with k copies of X; [X,Y]_0 = Y.
template <class T>
std::vector<T> iterated_bracket(const GradedAlgebra& g, const std::vector<T>& x, const std::vector<T>& y, int k)
{
	std::vector<T> r = y;
	for (int n = 0; n < k && !is_zero_vector(r); ++n) r = g.bracket(x, r);
	return r;
}

template <class T>
std::vector<T> dilate(const GradedAlgebra& g, const std::vector<T>& x, const T& r)
{
	std::vector<T> out = x;
	for (int i = 0; i < g.dim(); ++i)
	{
		T p(1);
		for (int l = 0; l < g.layer_of(i); ++l) p *= r;
		out[static_cast<std::size_t>(i)] *= p;
	}
	return out;
}

template <class T>
std::vector<T> project_layer(const GradedAlgebra& g, const std::vector<T>& x, int layer)
{
	std::vector<T> out(x.size(), T(0));
	for (int i = 0; i < g.dim(); ++i)
		if (g.layer_of(i) == layer) out[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
	return out;
}

// Zeroes every layer below `layer`.
template <class T>
std::vector<T> project_tail(const GradedAlgebra& g, const std::vector<T>& x, int layer)
{
	std::vector<T> out(x.size(), T(0));
	for (int i = 0; i < g.dim(); ++i)
		if (g.layer_of(i) >= layer) out[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
	return out;
}

// Euclidean norm of the layer-i coordinates.
double layer_norm(const GradedAlgebra& g, const RVec& x, int layer);

void check_layer(const GradedAlgebra& g, int layer);

struct GradingViolation
{
	enum class Kind { antisymmetry, jacobi, grading };
	Kind kind;
	std::vector<int> indices; // 1-based, as users read them
	std::string message;
};

std::vector<GradingViolation> validate_grading(const GradedAlgebra& g);
int homogeneous_dimension(const GradedAlgebra& g);
bool is_stratified(const GradedAlgebra& g);

// Certified beta with ||[X,Y]|| <= beta ||X|| ||Y|| for the Euclidean
// coordinate norm, from the l1 sizes of the table entries.
double bracket_norm_bound(const GradedAlgebra& g);

// Span of [V_a, V_b] inside the ambient space.
Subspace bracket_span(const GradedAlgebra& g, const Subspace& a, const Subspace& b);
Subspace layer_space(const GradedAlgebra& g, int layer);

} // namespace carnot
