#pragma once

#include "carnot/graded_algebra.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace carnot {

using Word = std::vector<std::uint8_t>;
using WordPoly = std::map<Word, Rational>;

// Number of degree-n basic commutators on p letters (Witt's necklace formula).
long long witt_dimension(int p, int n);

constexpr int kFreeNilpotentBudget = 200;

struct HallElement
{
	int degree = 1;
	int generator = -1; // letter index for degree 1
	int left = -1, right = -1;
	std::string name;
};

// Hall basis of the free Lie algebra on p letters truncated above max_degree.
// Elements are ordered by degree, then by creation order; [u,v] is basic when
// u > v and, for u = [x,y], y <= v.
class HallBasis
{
public:
	HallBasis(int letters, int max_degree);

	int letters() const { return p_; }
	int max_degree() const { return deg_; }
	int size() const { return static_cast<int>(elems_.size()); }
	const std::vector<HallElement>& elements() const { return elems_; }
	const WordPoly& polynomial(int i) const { return polys_[static_cast<std::size_t>(i)]; }

	// Free nilpotent algebra with this basis (layer = degree).
	const GradedAlgebra& algebra() const { return *alg_; }
	AlgebraPtr algebra_ptr() const { return alg_; }

	// Coordinates of a homogeneous Lie polynomial of the given degree.
	QVec coordinates(const WordPoly& lie_poly, int degree) const;

	// Values of all basis elements under letters -> images in a target algebra.
	template <class T>
	std::vector<std::vector<T>> evaluate(const GradedAlgebra& target, const std::vector<std::vector<T>>& images) const;

private:
	int p_, deg_;
	std::vector<HallElement> elems_;
	std::vector<WordPoly> polys_;
	// per degree: basis element indices, pivot words, inverse of the pivot block
	struct DegreeSolver
	{
		std::vector<int> elements;
		std::vector<Word> pivot_words;
		QMatrix inverse;
	};
	std::vector<DegreeSolver> solvers_;
	AlgebraPtr alg_;
};

template <class T>
std::vector<std::vector<T>> HallBasis::evaluate(const GradedAlgebra& target,
                                                const std::vector<std::vector<T>>& images) const
{
	std::vector<std::vector<T>> val(elems_.size());
	for (std::size_t h = 0; h < elems_.size(); ++h)
	{
		const auto& e = elems_[h];
		if (e.degree == 1)
			val[h] = images[static_cast<std::size_t>(e.generator)];
		else
			val[h] = target.bracket(val[static_cast<std::size_t>(e.left)], val[static_cast<std::size_t>(e.right)]);
	}
	return val;
}

// Cached Hall basis per (letters, degree); safe for concurrent use.
const HallBasis& hall_basis(int letters, int max_degree);

// Linear map from free_nilpotent(p, step) sending letter i to images[i];
// returned as a dim(target) x dim(free) matrix.
QMatrix free_extension(int letters, int step, const GradedAlgebra& target, const std::vector<QVec>& images);

// Element of the free associative algebra truncated above `degree`.
class FreeSeries
{
public:
	FreeSeries(int letters, int degree) : p_(letters), deg_(degree) {}

	static FreeSeries constant(int letters, int degree, const Rational& c);
	static FreeSeries letter(int letters, int degree, int a);

	int letters() const { return p_; }
	int degree() const { return deg_; }
	const WordPoly& terms() const { return c_; }
	Rational coefficient(const Word& w) const;

	FreeSeries operator+(const FreeSeries& o) const;
	FreeSeries operator-(const FreeSeries& o) const;
	FreeSeries operator*(const FreeSeries& o) const;
	FreeSeries scaled(const Rational& s) const;

	// exp of a series without constant term; log of a series with constant 1.
	FreeSeries exp() const;
	FreeSeries log() const;

	WordPoly homogeneous_part(int n) const;

private:
	void add_term(const Word& w, const Rational& c);
	int p_, deg_;
	WordPoly c_;
};

} // namespace carnot
