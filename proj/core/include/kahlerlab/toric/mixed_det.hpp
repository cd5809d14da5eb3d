#pragma once

#include <initializer_list>
#include <span>
#include <utility>

#include "kahlerlab/types.hpp"

namespace kahlerlab::toric {

/// Determinant of a matrix of size at most 3, closed form.
double small_det(const Mat& a);

/// Mixed determinant D(A_1, ..., A_n) by polarization,
/// (1/n!) Σ_{S ⊆ [n]} (-1)^{n-|S|} det(Σ_{i∈S} A_i). Throws InvalidArgument on size mismatch.
double mixed_determinant(std::span<const Mat> args);

/// Mixed determinant with repeated arguments: each pair is (matrix, multiplicity), Σ multiplicities = n.
double mixed_determinant(std::initializer_list<std::pair<Mat, int>> args);

}  // namespace kahlerlab::toric
