#include "carnot/graded_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace carnot {

GradedAlgebra::GradedAlgebra(std::string name, std::vector<int> layer_of, std::vector<std::string> basis_names,
                             std::vector<BracketEntry> brackets)
    : name_(std::move(name)), layer_of_(std::move(layer_of)), names_(std::move(basis_names)), raw_(std::move(brackets))
{
	int n = dim();
	if (n <= 0) throw std::invalid_argument("algebra must have positive dimension");
	for (int l : layer_of_)
	{
		if (l < 1) throw std::invalid_argument("layer indices start at 1");
		step_ = std::max(step_, l);
	}
	if (names_.empty())
		for (int i = 0; i < n; ++i) names_.push_back("e" + std::to_string(i + 1));
	if (static_cast<int>(names_.size()) != n) throw std::invalid_argument("basis_names length differs from dim");

	table_.assign(static_cast<std::size_t>(n * n), {});
	std::vector<bool> explicit_entry(static_cast<std::size_t>(n * n), false);
	auto add_terms = [&](int i, int j, const std::vector<StructureTerm>& terms, int sign) {
		auto& slot = table_[static_cast<std::size_t>(i * n + j)];
		for (const auto& t : terms)
		{
			if (t.k < 0 || t.k >= n) throw std::invalid_argument("bracket term index out of range");
			auto it = std::find_if(slot.begin(), slot.end(), [&](const StructureTerm& s) { return s.k == t.k; });
			Rational c = sign > 0 ? t.c : Rational(-t.c);
			if (it == slot.end())
				slot.push_back({t.k, c});
			else
				it->c += c;
		}
	};
	for (const auto& e : raw_)
	{
		if (e.i < 0 || e.i >= n || e.j < 0 || e.j >= n) throw std::invalid_argument("bracket index out of range");
		add_terms(e.i, e.j, e.terms, 1);
		explicit_entry[static_cast<std::size_t>(e.i * n + e.j)] = true;
	}
	for (const auto& e : raw_)
		if (!explicit_entry[static_cast<std::size_t>(e.j * n + e.i)]) add_terms(e.j, e.i, e.terms, -1);
	for (auto& slot : table_)
	{
		slot.erase(std::remove_if(slot.begin(), slot.end(), [](const StructureTerm& t) { return sgn(t.c) == 0; }),
		           slot.end());
		std::sort(slot.begin(), slot.end(), [](const StructureTerm& a, const StructureTerm& b) { return a.k < b.k; });
	}

	by_first_.assign(static_cast<std::size_t>(n), {});
	for (int i = 0; i < n; ++i)
		for (int j = 0; j < n; ++j)
			for (const auto& t : terms(i, j)) by_first_[static_cast<std::size_t>(i)].push_back({j, t.k, t.c, t.c.get_d()});
}

int GradedAlgebra::layer_dim(int layer) const
{
	return static_cast<int>(std::count(layer_of_.begin(), layer_of_.end(), layer));
}

std::vector<int> GradedAlgebra::layer_indices(int layer) const
{
	std::vector<int> idx;
	for (int i = 0; i < dim(); ++i)
		if (layer_of(i) == layer) idx.push_back(i);
	return idx;
}

bool GradedAlgebra::layers_sorted() const { return std::is_sorted(layer_of_.begin(), layer_of_.end()); }

std::vector<BracketEntry> GradedAlgebra::canonical_brackets() const
{
	std::vector<BracketEntry> out;
	for (int i = 0; i < dim(); ++i)
		for (int j = i + 1; j < dim(); ++j)
			if (!terms(i, j).empty()) out.push_back({i, j, terms(i, j)});
	return out;
}

QVec GradedAlgebra::basis_vector(int i) const
{
	QVec v(static_cast<std::size_t>(dim()));
	v[static_cast<std::size_t>(i)] = 1;
	return v;
}

double layer_norm(const GradedAlgebra& g, const RVec& x, int layer)
{
	double s = 0;
	for (int i = 0; i < g.dim(); ++i)
		if (g.layer_of(i) == layer) s += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
	return std::sqrt(s);
}

void check_layer(const GradedAlgebra& g, int layer)
{
	if (layer < 1 || layer > g.step())
		throw std::out_of_range("layer " + std::to_string(layer) + " outside 1.." + std::to_string(g.step()));
}

std::vector<GradingViolation> validate_grading(const GradedAlgebra& g)
{
	std::vector<GradingViolation> out;
	int n = g.dim();
	for (int l = 1; l <= g.step(); ++l)
		if (g.layer_dim(l) == 0)
			out.push_back({GradingViolation::Kind::grading, {l}, "layer " + std::to_string(l) + " is empty"});

	auto coeff = [&](int i, int j, int k) -> Rational {
		for (const auto& t : g.terms(i, j))
			if (t.k == k) return t.c;
		return 0;
	};
	for (int i = 0; i < n; ++i)
		for (int j = i; j < n; ++j)
			for (int k = 0; k < n; ++k)
			{
				Rational a = coeff(i, j, k), b = coeff(j, i, k);
				if (a + b != 0)
					out.push_back({GradingViolation::Kind::antisymmetry, {i + 1, j + 1, k + 1},
					               "antisymmetry violation at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
					                   "," + std::to_string(k + 1) + ")"});
			}
	for (int i = 0; i < n; ++i)
		for (int j = 0; j < n; ++j)
			for (const auto& t : g.terms(i, j))
				if (i < j && g.layer_of(t.k) != g.layer_of(i) + g.layer_of(j))
					out.push_back({GradingViolation::Kind::grading, {i + 1, j + 1, t.k + 1},
					               "grading violation at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
					                   std::to_string(t.k + 1) + "): layer " + std::to_string(g.layer_of(t.k)) +
					                   " != " + std::to_string(g.layer_of(i)) + "+" + std::to_string(g.layer_of(j))});
	for (int i = 0; i < n; ++i)
		for (int j = i + 1; j < n; ++j)
			for (int k = j + 1; k < n; ++k)
			{
				QVec a = g.basis_vector(i), b = g.basis_vector(j), c = g.basis_vector(k);
				QVec s = g.bracket(a, g.bracket(b, c));
				s = add(s, g.bracket(b, g.bracket(c, a)));
				s = add(s, g.bracket(c, g.bracket(a, b)));
				if (!is_zero_vector(s))
					out.push_back({GradingViolation::Kind::jacobi, {i + 1, j + 1, k + 1},
					               "Jacobi identity fails on (" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
					                   "," + std::to_string(k + 1) + ")"});
			}
	return out;
}

int homogeneous_dimension(const GradedAlgebra& g)
{
	int q = 0;
	for (int l : g.layers()) q += l;
	return q;
}

Subspace layer_space(const GradedAlgebra& g, int layer)
{
	return Subspace::coordinates(static_cast<std::size_t>(g.dim()), g.layer_indices(layer));
}

Subspace bracket_span(const GradedAlgebra& g, const Subspace& a, const Subspace& b)
{
	std::vector<QVec> vs;
	for (const auto& u : a.basis())
		for (const auto& v : b.basis())
		{
			QVec w = g.bracket(u, v);
			if (!is_zero_vector(w)) vs.push_back(std::move(w));
		}
	return Subspace::span(static_cast<std::size_t>(g.dim()), vs);
}

bool is_stratified(const GradedAlgebra& g)
{
	Subspace v1 = layer_space(g, 1);
	for (int l = 1; l < g.step(); ++l)
		if (!(bracket_span(g, v1, layer_space(g, l)) == layer_space(g, l + 1))) return false;
	return true;
}

double bracket_norm_bound(const GradedAlgebra& g)
{
	// ||[X,Y]|| <= sum_{i,j} |x_i||y_j| ||[b_i,b_j]|| <= ||X|| ||Y|| sqrt(sum_{i,j} ||[b_i,b_j]||^2)
	double s = 0;
	for (int i = 0; i < g.dim(); ++i)
		for (int j = 0; j < g.dim(); ++j)
		{
			double c = 0;
			for (const auto& t : g.terms(i, j)) c += std::abs(t.c.get_d());
			s += c * c;
		}
	return std::sqrt(s);
}

} // namespace carnot
