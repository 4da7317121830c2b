#pragma once

#include "carnot/rational.hpp"

#include <optional>
#include <vector>

namespace carnot {

// Dense exact matrix, row major.
class QMatrix
{
public:
	QMatrix() = default;
	QMatrix(std::size_t rows, std::size_t cols);

	static QMatrix identity(std::size_t n);
	static QMatrix from_rows(const std::vector<QVec>& rows, std::size_t cols);
	static QMatrix from_columns(const std::vector<QVec>& cols, std::size_t rows);

	std::size_t rows() const { return rows_; }
	std::size_t cols() const { return cols_; }

	Rational& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
	const Rational& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

	QVec row(std::size_t i) const;
	QVec col(std::size_t j) const;

	QMatrix transpose() const;
	QMatrix operator*(const QMatrix& o) const;
	QMatrix operator+(const QMatrix& o) const;
	QMatrix operator-(const QMatrix& o) const;
	QVec apply(const QVec& x) const;
	bool operator==(const QMatrix& o) const;

	bool is_zero() const;
	RVec to_double_rowmajor() const;

private:
	std::size_t rows_ = 0, cols_ = 0;
	std::vector<Rational> a_;
};

struct Rref
{
	QMatrix m;
	std::vector<std::size_t> pivots; // pivot column of each nonzero row
};

Rref rref(QMatrix m);
std::size_t rank(const QMatrix& m);
std::vector<QVec> nullspace(const QMatrix& m);
// Solution with free variables set to zero, or nullopt if inconsistent.
std::optional<QVec> solve(const QMatrix& a, const QVec& b);
std::optional<QMatrix> inverse(const QMatrix& m);
Rational determinant(QMatrix m);

// Subspace of Q^n stored as reduced row echelon basis, so equal subspaces
// have identical bases.
class Subspace
{
public:
	explicit Subspace(std::size_t ambient = 0) : n_(ambient) {}

	static Subspace span(std::size_t ambient, const std::vector<QVec>& vectors);
	static Subspace whole(std::size_t ambient);
	static Subspace coordinates(std::size_t ambient, const std::vector<int>& indices);

	std::size_t ambient() const { return n_; }
	std::size_t dim() const { return basis_.size(); }
	const std::vector<QVec>& basis() const { return basis_; }
	const std::vector<std::size_t>& pivots() const { return pivots_; }

	bool contains(const QVec& v) const;
	bool contains(const Subspace& s) const;
	std::optional<QVec> coordinates_of(const QVec& v) const;

	Subspace sum(const Subspace& o) const;
	Subspace intersect(const Subspace& o) const;
	// Orthogonal complement for the standard inner product.
	Subspace orthogonal() const;

	bool operator==(const Subspace& o) const { return n_ == o.n_ && basis_ == o.basis_; }

private:
	std::size_t n_ = 0;
	std::vector<QVec> basis_;
	std::vector<std::size_t> pivots_;
};

// Vectors from `candidates` (in order) that extend a basis of `inner` to a
// basis of inner + span(candidates).
std::vector<QVec> extend_basis(const Subspace& inner, const std::vector<QVec>& candidates);

// Basis of a complement of `inner` inside `outer`, drawn from outer's basis.
std::vector<QVec> complement_in(const Subspace& inner, const Subspace& outer);

} // namespace carnot
