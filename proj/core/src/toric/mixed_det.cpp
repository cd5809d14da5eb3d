#include "kahlerlab/toric/mixed_det.hpp"

#include <bit>
#include <vector>

#include "kahlerlab/error.hpp"

namespace kahlerlab::toric {

double small_det(const Mat& a) {
  switch (a.rows()) {
    case 1:
      return a(0, 0);
    case 2:
      return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    case 3:
      return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
             a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
             a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    default:
      throw InvalidArgument("small_det supports sizes 1..3");
  }
}

double mixed_determinant(std::span<const Mat> args) {
  const int n = static_cast<int>(args.size());
  if (n < 1 || n > kMaxDim) throw InvalidArgument("mixed determinant needs 1..3 arguments");
  for (const Mat& m : args) {
    if (m.rows() != n || m.cols() != n) throw InvalidArgument("mixed determinant: dimension mismatch");
  }
  double total = 0.0;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    Mat sum = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) sum += args[i];
    const int missing = n - std::popcount(mask);
    total += (missing % 2 ? -1.0 : 1.0) * small_det(sum);
  }
  double nfact = 1.0;
  for (int i = 2; i <= n; ++i) nfact *= i;
  return total / nfact;
}

double mixed_determinant(std::initializer_list<std::pair<Mat, int>> args) {
  Mat slots[kMaxDim];
  int used = 0;
  for (const auto& [m, mult] : args) {
    if (mult < 0) throw InvalidArgument("negative multiplicity");
    for (int c = 0; c < mult; ++c) {
      if (used == kMaxDim) throw InvalidArgument("mixed determinant: multiplicities exceed dimension");
      slots[used++] = m;
    }
  }
  return mixed_determinant(std::span<const Mat>(slots, used));
}

}  // namespace kahlerlab::toric
