#include <cmath>
#include <fstream>

#include "finsight/error.hpp"
#include "finsight/rng.hpp"
#include "finsight/synth.hpp"

namespace finsight::synth {

namespace {

const char* kCompanyStems[] = {"Apex",    "Summit",  "Harbor",  "Pioneer", "Sterling", "Crescent",
                               "Beacon",  "Granite", "Liberty", "Cascade", "Orchard",  "Fairview",
                               "Monarch", "Juniper", "Redwood", "Bluffton"};

const char* kCompanyKinds[] = {"Financial",     "Bank",           "Credit Services",
                               "Lending",       "Mortgage",       "Card Services",
                               "Recovery Group", "Holdings"};

const char* kProducts[] = {"Credit reporting",
                           "Debt collection",
                           "Mortgage",
                           "Credit card",
                           "Checking or savings account",
                           "Student loan",
                           "Vehicle loan or lease",
                           "Money transfer",
                           "Payday loan",
                           "Prepaid card"};

const char* kIssues[] = {"Incorrect information on your report",
                         "Problem with a credit reporting company's investigation",
                         "Attempts to collect debt not owed",
                         "Written notification about debt",
                         "Trouble during payment process",
                         "Struggling to pay mortgage",
                         "Applying for a mortgage",
                         "Problem with a purchase shown on your statement",
                         "Fees or interest",
                         "Problem when making payments",
                         "Managing an account",
                         "Deposits and withdrawals",
                         "Closing an account",
                         "Dealing with your lender or servicer",
                         "Struggling to repay your loan",
                         "Getting a loan or lease",
                         "Problems at the end of the loan or lease",
                         "Fraud or scam",
                         "Other transaction problem",
                         "Unauthorized transactions or other transaction problem",
                         "Problem with a lender or other company charging your account",
                         "Advertising and marketing",
                         "Getting a credit card",
                         "Problem getting a card or closing an account"};

const char* kStates[] = {"CA", "TX", "FL", "NY", "PA", "IL", "OH", "GA", "NC", "MI",
                         "NJ", "VA", "WA", "AZ", "MA", "TN", "IN", "MO", "MD", "WI",
                         "CO", "MN", "SC", "AL", "LA", "KY", "OR", "OK", "CT", "UT",
                         "IA", "NV", "AR", "MS", "KS", "NM", "NE", "ID", "WV", "HI",
                         "NH", "ME", "MT", "RI", "DE", "SD", "ND", "AK", "VT", "WY"};

// Disjoint planted topic vocabularies; every word is 3+ letters and absent
// from the stopword list, so tokenization keeps them all.
const std::vector<std::vector<std::string>>& planted_topics() {
  static const std::vector<std::vector<std::string>> topics = {
      {"loan", "mortgage", "payment", "escrow", "refinance", "lender", "interest", "foreclosure",
       "servicer", "modification"},
      {"credit", "report", "score", "inquiry", "bureau", "dispute", "account", "error", "identity",
       "theft"},
      {"debt", "collection", "collector", "calls", "harassment", "validation", "balance", "letter",
       "agency", "owed"},
      {"card", "charge", "fee", "bank", "transaction", "refund", "merchant", "billing",
       "statement", "overdraft"},
  };
  return topics;
}

template <std::size_t N>
std::string pick_name(const char* const (&pool)[N], int index) {
  if (index < static_cast<int>(N)) return pool[index];
  return std::string(pool[index % N]) + " " + std::to_string(index / N);
}

std::vector<std::string> company_names(int count) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    std::string name = std::string(kCompanyStems[i % 16]) + " " + kCompanyKinds[(i / 16) % 8];
    if (i >= 128) name += " " + std::to_string(i / 128);
    if (i % 7 == 3) name += ", Inc.";         // commas exercise CSV quoting
    if (i % 11 == 5) name += " \"National\"";  // so do embedded quotes
    names.push_back(std::move(name));
  }
  return names;
}

// Quadratically skewed index in [0, n): low indices come up most often, which
// gives the frequency encoder a spread of values to work with.
int skewed_index(Rng& rng, int n) {
  const double u = uniform_unit(rng);
  const int idx = static_cast<int>(u * u * n);
  return std::min(idx, n - 1);
}

bool bernoulli(Rng& rng, double p) { return uniform_unit(rng) < p; }

// Per product, one of four response-category profiles over the 8 outcomes.
const std::vector<std::vector<double>>& response_profiles() {
  static const std::vector<std::vector<double>> profiles = {
      {0.55, 0.15, 0.05, 0.10, 0.05, 0.05, 0.03, 0.02},
      {0.30, 0.30, 0.05, 0.15, 0.07, 0.06, 0.04, 0.03},
      {0.25, 0.10, 0.08, 0.35, 0.08, 0.06, 0.04, 0.04},
      {0.30, 0.10, 0.20, 0.05, 0.08, 0.05, 0.20, 0.02},
  };
  return profiles;
}

int draw_categorical(Rng& rng, const std::vector<double>& weights) {
  const double u = uniform_unit(rng);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    cumulative += weights[i];
    if (u < cumulative) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size()) - 1;
}

std::string make_narrative(Rng& rng) {
  const auto& topics = planted_topics();
  const std::size_t topic = static_cast<std::size_t>(uniform_below(rng, topics.size()));
  const std::vector<std::string>& vocab = topics[topic];

  const int length = 8 + static_cast<int>(uniform_below(rng, 18));
  std::string text;
  for (int i = 0; i < length; ++i) {
    if (!text.empty()) text += " ";
    if (bernoulli(rng, 0.12)) {
      text += "XXXX";
      continue;
    }
    if (bernoulli(rng, 0.15)) {
      static const char* fillers[] = {"the", "and", "was", "not", "my", "to"};
      text += fillers[uniform_below(rng, 6)];
      continue;
    }
    const int w = skewed_index(rng, static_cast<int>(vocab.size()));
    std::string word = vocab[static_cast<std::size_t>(w)];
    if (i == 0) word[0] = static_cast<char>(word[0] - 'a' + 'A');
    text += word;
    if (bernoulli(rng, 0.05)) text += ",";
  }
  if (bernoulli(rng, 0.3)) text += ".";
  if (bernoulli(rng, 0.02)) text += "\nThey never answered.";
  return text;
}

}  // namespace

void SynthSpec::validate() const {
  if (rows < 1) raise(Errc::bad_config, "rows must be at least 1");
  if (companies < 2 || products < 2 || issues < 1 || states < 1) {
    raise(Errc::bad_config, "need at least 2 companies, 2 products, 1 issue, 1 state");
  }
  if (signal < 0.0) raise(Errc::bad_config, "signal must be non-negative");
  if (narrative_fraction < 0.0 || narrative_fraction > 1.0 || missing_rate < 0.0 ||
      missing_rate > 1.0) {
    raise(Errc::bad_config, "narrative_fraction and missing_rate must lie in [0, 1]");
  }
}

std::vector<ingest::ComplaintRecord> synthetic_records(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  const std::vector<std::string> companies = company_names(spec.companies);
  const Date origin = *parse_date("2011-12-01");
  const int date_span = 4534;  // days through 2024-04-30

  std::vector<ingest::ComplaintRecord> records;
  records.reserve(spec.rows);
  for (std::size_t row = 0; row < spec.rows; ++row) {
    ingest::ComplaintRecord record;
    record.complaint_id = std::to_string(1000001 + row);

    const int company = skewed_index(rng, spec.companies);
    const int product = skewed_index(rng, spec.products);
    const int issue = skewed_index(rng, spec.issues);
    const int state = skewed_index(rng, spec.states);
    record.company = companies[static_cast<std::size_t>(company)];
    record.product = pick_name(kProducts, product);
    record.issue = pick_name(kIssues, issue);
    record.state = bernoulli(rng, spec.missing_rate) ? "" : pick_name(kStates, state);

    record.date_received = add_days(origin, static_cast<int>(uniform_below(
                                                rng, static_cast<std::uint64_t>(date_span))));
    if (bernoulli(rng, 0.01)) {
      record.date_sent.reset();
    } else if (bernoulli(rng, 0.005)) {
      // A few out-of-order pairs so the summary's violation counter has work.
      record.date_sent = add_days(record.date_received,
                                  -1 - static_cast<int>(uniform_below(rng, 5)));
    } else {
      const double u = uniform_unit(rng);
      record.date_sent = add_days(record.date_received, static_cast<int>(u * u * 30.0));
    }

    // Planted timely mechanism: XOR of company tier and product tier, plus a
    // weak linear state term; `signal` scales the whole logit.
    const bool company_high = company < spec.companies / 2;
    const bool product_high = product < spec.products / 2;
    const bool interaction = company_high != product_high;
    const double state_term =
        (static_cast<double>(state) / static_cast<double>(spec.states) - 0.5) * 2.0;
    const double logit = spec.signal * (2.2 * (interaction ? 1.0 : -1.0) + 0.8 * state_term) + 1.0;
    const bool timely = uniform_unit(rng) < 1.0 / (1.0 + std::exp(-logit));
    if (bernoulli(rng, spec.missing_rate / 2.0)) {
      record.timely_response = ingest::Timely::missing;
    } else {
      record.timely_response = timely ? ingest::Timely::yes : ingest::Timely::no;
    }

    const auto& profile = response_profiles()[static_cast<std::size_t>(product) %
                                              response_profiles().size()];
    const int category = draw_categorical(rng, profile);
    if (bernoulli(rng, spec.missing_rate)) {
      record.company_response.reset();
    } else {
      record.company_response = static_cast<ingest::ResponseCategory>(category);
    }

    if (bernoulli(rng, spec.narrative_fraction)) record.narrative = make_narrative(rng);
    records.push_back(std::move(record));
  }
  return records;
}

void generate_synthetic(const SynthSpec& spec, const std::string& path) {
  const std::vector<ingest::ComplaintRecord> records = synthetic_records(spec);
  const ingest::SchemaSpec schema = ingest::SchemaSpec::cfpb_default();

  std::ofstream out(path, std::ios::binary);
  if (!out) raise(Errc::io, "cannot write " + path);
  out << ingest::csv_line(schema.source_header_order());
  for (const ingest::ComplaintRecord& record : records) {
    out << ingest::csv_line(ingest::to_row(record, schema));
  }
  if (!out) raise(Errc::io, "short write on " + path);
}

}  // namespace finsight::synth
