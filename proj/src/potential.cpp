#include "simop/potential.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

namespace simop {

PotentialSpec::PotentialSpec(TruncationWindow window, std::map<int, Block> coeffs) : window_(window) {
  for (auto& [n, b] : coeffs) set_coefficient(n, std::move(b));
}

Block PotentialSpec::coefficient(int n) const {
  auto it = coeffs_.find(n);
  if (it == coeffs_.end()) return Block::Zero(window_.dim(), window_.dim());
  return it->second;
}

void PotentialSpec::set_coefficient(int n, Block value) {
  if (std::abs(n) > band()) {
    std::ostringstream msg;
    msg << "potential coefficient index " << n << " outside the band |n| <= " << band();
    throw std::out_of_range(msg.str());
  }
  if (value.rows() != window_.dim() || value.cols() != window_.dim()) {
    throw std::invalid_argument("potential coefficient is not dim x dim");
  }
  coeffs_[n] = std::move(value);
}

int PotentialSpec::support_radius() const {
  int r = 0;
  for (const auto& [n, b] : coeffs_) {
    if (!b.isZero(0.0)) r = std::max(r, std::abs(n));
  }
  return r;
}

PotentialSpec constant_over_c(const TruncationWindow& window, double c) {
  if (c == 0.0 || !std::isfinite(c)) throw std::invalid_argument("constant potential needs a finite nonzero c");
  PotentialSpec spec(window);
  spec.set_coefficient(0, Block::Identity(window.dim(), window.dim()) / c);
  return spec;
}

PotentialSpec coefficients_from_samples(const TruncationWindow& window, std::span<const Block> samples) {
  const auto m = static_cast<long>(samples.size());
  const int band = 2 * window.half_width();
  if (m < 2L * band + 1) {
    std::ostringstream msg;
    msg << "need at least " << 2 * band + 1 << " samples to resolve |n| <= " << band << ", got " << m;
    throw std::invalid_argument(msg.str());
  }
  PotentialSpec spec(window);
  for (int n = -band; n <= band; ++n) {
    Block acc = Block::Zero(window.dim(), window.dim());
    for (long p = 0; p < m; ++p) {
      const auto& s = samples[static_cast<std::size_t>(p)];
      if (s.rows() != window.dim() || s.cols() != window.dim()) {
        throw std::invalid_argument("potential sample is not dim x dim");
      }
      // Reduce n*p modulo m first so the phase stays accurate for large products.
      const long r = ((static_cast<long>(n) * p) % m + m) % m;
      const double phase = -2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(m);
      acc += std::polar(1.0, phase) * s;
    }
    acc /= static_cast<double>(m);
    if (!acc.isZero(0.0)) spec.set_coefficient(n, acc);
  }
  return spec;
}

std::vector<Block> read_potential_samples(std::istream& in, int dim) {
  std::vector<Block> out;
  std::string line;
  int line_no = 0;
  const int expected = 2 * dim * dim;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument("sample file line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
      }
    }
    if (static_cast<int>(values.size()) != expected) {
      throw std::invalid_argument("sample file line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(expected) + " columns, got " + std::to_string(values.size()));
    }
    Block b(dim, dim);
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) {
        const auto k = static_cast<std::size_t>(2 * (r * dim + c));
        b(r, c) = cplx(values[k], values[k + 1]);
      }
    }
    out.push_back(std::move(b));
  }
  return out;
}

BlockMatrix build_v_matrix(const PotentialSpec& spec) {
  const TruncationWindow& w = spec.window();
  const int n = w.half_width();
  BlockMatrix v(w);
  for (int j = -n; j <= n; ++j) {
    for (int l = -n; l <= n; ++l) {
      auto it = spec.coeffs().find(j + l);
      if (it != spec.coeffs().end() && !it->second.isZero(0.0)) v.set_block(j, l, it->second);
    }
  }
  return v;
}

const char* to_string(SufficientCondition c) {
  switch (c) {
    case SufficientCondition::AbsolutelySummable: return "absolutely_summable";
    case SufficientCondition::HilbertSchmidtValued: return "hilbert_schmidt_valued";
    case SufficientCondition::Neither: return "neither";
  }
  return "neither";
}

BlockMatrix condition4_matrix(const PotentialSpec& spec) {
  const TruncationWindow& w = spec.window();
  const int big_n = w.half_width();
  BlockMatrix z(w);
  for (int j = -big_n; j <= big_n; ++j) {
    for (int l = -big_n; l <= big_n; ++l) {
      Block acc = Block::Zero(w.dim(), w.dim());
      bool touched = false;
      for (int n = -big_n; n <= big_n; ++n) {
        if (n == l) continue;
        auto a = spec.coeffs().find(j + n);
        auto b = spec.coeffs().find(n + l);
        if (a == spec.coeffs().end() || b == spec.coeffs().end()) continue;
        acc += (a->second * b->second) / (w.lambda(n) - w.lambda(l));
        touched = true;
      }
      if (touched && !acc.isZero(0.0)) z.set_block(j, l, acc);
    }
  }
  return z;
}

AdmissibilityReport check_admissibility(const PotentialSpec& spec) {
  AdmissibilityReport report;
  const int half = spec.window().half_width();
  double l1_tail = 0.0;
  double sq_tail = 0.0;
  for (const auto& [n, b] : spec.coeffs()) {
    const double nb = spectral_norm(b);
    report.sum_sq += nb * nb;
    report.l1_norm += nb;
    if (std::abs(n) > half) {
      l1_tail += nb;
      sq_tail += nb * nb;
    }
  }
  report.cond4_norm = hs_norm(condition4_matrix(spec));

  // Finite sums always converge; the flag records whether the outer half of
  // the band is already negligible for the respective series.
  constexpr double kTailFraction = 1e-3;
  if (l1_tail <= kTailFraction * report.l1_norm) {
    report.sufficient = SufficientCondition::AbsolutelySummable;
  } else if (sq_tail <= kTailFraction * report.sum_sq) {
    report.sufficient = SufficientCondition::HilbertSchmidtValued;
  } else {
    report.sufficient = SufficientCondition::Neither;
  }
  return report;
}

}  // namespace simop
