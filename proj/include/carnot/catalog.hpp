#pragma once

#include "carnot/graded_algebra.hpp"

#include <string>
#include <vector>

namespace carnot {

AlgebraPtr abelian(int k);
// Basis X1,Y1,...,Xn,Yn,Z with [Xi,Yi] = Z (X,Y,Z when n = 1).
AlgebraPtr heisenberg(int n);
// Basis R0,R1,R2,R3,Z1,Z2 with [R0,R1]=[R2,R3]=Z1, [R0,R2]=-[R1,R3]=Z2.
AlgebraPtr complexified_heisenberg();
AlgebraPtr free_nilpotent(int letters, int step);
AlgebraPtr direct_product(const GradedAlgebra& a, const GradedAlgebra& b);
// Basis X1..X4, Z23, Z24, Z34 with [X2,X3]=Z23, [X2,X4]=Z24, [X3,X4]=Z34.
AlgebraPtr example_g42();

// H-type data on an orthonormal basis of v (dim m) and z (dim q).
struct HTypeData
{
	int m = 0;
	std::vector<QMatrix> j; // J_{Z_k} as m x m matrices acting on column vectors
	std::vector<std::string> v_names, z_names;
};

struct HTypeCheck
{
	bool ok = true;
	std::string failure; // first failing identity with a witness
};

// Brackets from <J_Z X, Y> = <Z, [X,Y]>. Throws std::invalid_argument with
// a witness if J does not satisfy |J_Z X| = |Z||X|.
AlgebraPtr h_type_from_j(const HTypeData& data, const std::string& name = "h_type");
// J_{Z_k} read back from a step-2 algebra: (J_k)_{j,i} = c_{ij}^k.
HTypeData j_from_algebra(const GradedAlgebra& g);
// Norm identity, [X, J_Z X] = |X|^2 Z and J_Z J_W + J_W J_Z = -2<Z,W> Id,
// checked exactly on basis vectors and the given extra rational samples.
HTypeCheck check_h_type(const GradedAlgebra& g, const std::vector<QVec>& x_samples = {},
                        const std::vector<QVec>& z_samples = {});

// Unipotent (n+2)x(n+2) model of h^n.
class HeisenbergMatrixModel
{
public:
	explicit HeisenbergMatrixModel(int n) : n_(n) {}
	int size() const { return n_ + 2; }
	QMatrix lie_matrix(const QVec& x) const;
	QVec from_lie_matrix(const QMatrix& a) const;
	QMatrix exp(const QVec& x) const;
	QVec log(const QMatrix& m) const;
	QVec product(const QVec& x, const QVec& y) const;

private:
	int n_;
};

std::vector<std::string> catalog_names();
// Accepts the listed names plus hN, rN, free_P_S.
AlgebraPtr catalog_by_name(const std::string& name);

} // namespace carnot
