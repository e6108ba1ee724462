#include "twomode/model.hpp"

#include <cmath>
#include <numbers>

namespace twomode {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::TMSC: return "TMSC";
    case Scheme::TMAC: return "TMAC";
    case Scheme::GeneralPhi: return "GeneralPhi";
    case Scheme::SMSC: return "SMSC";
    case Scheme::DJC: return "DJC";
  }
  return "?";
}

Scheme parse_scheme(std::string_view s) {
  if (s == "TMSC" || s == "tmsc") return Scheme::TMSC;
  if (s == "TMAC" || s == "tmac") return Scheme::TMAC;
  if (s == "GeneralPhi" || s == "general_phi") return Scheme::GeneralPhi;
  if (s == "SMSC" || s == "smsc") return Scheme::SMSC;
  if (s == "DJC" || s == "djc") return Scheme::DJC;
  throw std::invalid_argument("unknown scheme '" + std::string(s) + "'");
}

std::vector<double> TimeGrid::times() const {
  validate();
  std::vector<double> t(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) t[k] = t_max * k / (samples - 1);
  return t;
}

void TimeGrid::validate() const {
  if (samples < 2) throw std::invalid_argument("time grid needs at least 2 samples");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    throw std::invalid_argument("time grid t_max must be positive");
  }
}

double ModelConfig::phase() const {
  switch (scheme) {
    case Scheme::TMSC: return 0.0;
    case Scheme::TMAC: return std::numbers::pi;
    case Scheme::GeneralPhi: return phi;
    default: throw std::logic_error("phase() is defined for the two-mode schemes only");
  }
}

std::vector<std::string> ModelConfig::field_labels() const {
  switch (scheme) {
    case Scheme::SMSC: return {"TF1"};
    case Scheme::DJC: return {"TF1", "TF2"};
    default: return {"F1", "F2"};
  }
}

SpaceLayout ModelConfig::layout() const {
  std::vector<int> dims{2, 2};
  std::vector<std::string> labels = kAtomLabels;
  for (const auto& l : field_labels()) {
    dims.push_back(cutoff);
    labels.push_back(l);
  }
  return {std::move(dims), std::move(labels)};
}

void ModelConfig::validate() const {
  if (!(g > 0.0) || !std::isfinite(g)) throw std::invalid_argument("coupling g must be > 0");
  if (cutoff < 2) throw std::invalid_argument("cutoff must be >= 2");
  if (scheme == Scheme::GeneralPhi && !(phi >= 0.0 && phi < 2.0 * std::numbers::pi)) {
    throw std::invalid_argument("phi must lie in [0, 2pi)");
  }
  if (excitation_cap && (*excitation_cap < 1 || *excitation_cap > cutoff - 1)) {
    throw std::invalid_argument("excitation cap must lie in [1, cutoff-1]");
  }
  grid.validate();
}

std::vector<int> excitation_numbers(const SpaceLayout& layout) {
  std::vector<bool> atom(layout.size());
  for (std::size_t i = 0; i < layout.size(); ++i) {
    atom[i] = layout.labels()[i].rfind("atom", 0) == 0;
    if (atom[i] && layout.dims()[i] != 2) {
      throw std::invalid_argument("excitation_numbers: atom subsystem must have dimension 2");
    }
  }
  std::vector<int> out(static_cast<std::size_t>(layout.total_dim()));
  for (Index idx = 0; idx < layout.total_dim(); ++idx) {
    int n = 0;
    for (std::size_t i = 0; i < layout.size(); ++i) {
      const int d = layout.digit(idx, i);
      n += atom[i] ? (d == 0 ? 1 : 0) : d;
    }
    out[idx] = n;
  }
  return out;
}

}  // namespace twomode
