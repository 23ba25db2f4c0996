#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "finsight/ingest.hpp"

namespace finsight::synth {

// Knobs for the synthetic CFPB-format benchmark generator. Targets come from
// planted mechanisms: timely_response flips on an interaction (XOR) of
// company-tier and product-tier plus a weak linear state term, so tree
// ensembles have signal that linear models cannot fully express;
// company_response follows a per-product conditional table; narratives are
// drawn from disjoint planted topic vocabularies.
struct SynthSpec {
  std::size_t rows = 10000;
  int companies = 40;
  int products = 8;
  int issues = 24;
  int states = 20;
  std::uint64_t seed = 0;
  double signal = 1.0;  // scales the planted logit; 0 leaves pure noise
  double narrative_fraction = 0.35;
  double missing_rate = 0.02;

  void validate() const;
};

std::vector<ingest::ComplaintRecord> synthetic_records(const SynthSpec& spec);

// CSV with the stock CFPB headers; byte-identical for equal specs.
void generate_synthetic(const SynthSpec& spec, const std::string& path);

}  // namespace finsight::synth
