#include "hfsense/kccq.hpp"

#include <algorithm>
#include <stdexcept>

namespace hfsense::kccq {

Variant variant_from_string(const std::string& s) {
  if (s == "sum_recent") return Variant::SumRecent;
  if (s == "sum_mean") return Variant::SumMean;
  if (s == "all_recent") return Variant::AllRecent;
  if (s == "all_mean") return Variant::AllMean;
  throw std::invalid_argument("unknown kccq variant: " + s);
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::SumRecent: return "sum_recent";
    case Variant::SumMean: return "sum_mean";
    case Variant::AllRecent: return "all_recent";
    case Variant::AllMean: return "all_mean";
  }
  return "?";
}

std::vector<std::string> feature_names(Variant v) {
  if (v == Variant::SumRecent || v == Variant::SumMean) return {"kccq_sum"};
  return {"kccq_phys", "kccq_symp", "kccq_qol", "kccq_soc"};
}

double summary_score(double phys, double symp, double qol, double soc) {
  for (double d : {phys, symp, qol, soc}) {
    if (!(d >= 0.0 && d <= 100.0)) {
      throw std::invalid_argument("domain score outside [0, 100]");
    }
  }
  return (phys + symp + qol + soc) / 4.0;
}

std::optional<KccqFeatures> kccq_features(std::span<const KccqResponse> surveys, Variant v) {
  if (surveys.empty()) return std::nullopt;

  KccqFeatures out;
  out.variant = v;

  // Latest timestamp wins; with equal timestamps the later stored survey is
  // taken (streams are sorted with stable tie order).
  const KccqResponse* recent = &surveys.front();
  for (const auto& s : surveys) {
    if (s.t >= recent->t) recent = &s;
  }

  const double n = static_cast<double>(surveys.size());
  switch (v) {
    case Variant::SumRecent:
      out.values = {recent->summary};
      break;
    case Variant::SumMean: {
      double sum = 0.0;
      for (const auto& s : surveys) sum += s.summary;
      out.values = {sum / n};
      break;
    }
    case Variant::AllRecent:
      out.values = {recent->phys, recent->symp, recent->qol, recent->soc};
      break;
    case Variant::AllMean: {
      double phys = 0.0, symp = 0.0, qol = 0.0, soc = 0.0;
      for (const auto& s : surveys) {
        phys += s.phys;
        symp += s.symp;
        qol += s.qol;
        soc += s.soc;
      }
      out.values = {phys / n, symp / n, qol / n, soc / n};
      break;
    }
  }
  return out;
}

}  // namespace hfsense::kccq
