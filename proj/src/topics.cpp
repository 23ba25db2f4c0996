#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>

#include "finsight/error.hpp"
#include "finsight/strings.hpp"
#include "finsight/topics.hpp"

namespace finsight::topics {

std::set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::io, "cannot open stopword file " + path);
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const std::string word = trim(line);
    if (!word.empty()) words.insert(word);
  }
  return words;
}

TokenizerRules default_rules() {
  TokenizerRules rules;
  rules.stopwords = default_stopwords();
  return rules;
}

std::vector<std::string> tokenize(const std::string& text, const TokenizerRules& rules) {
  std::vector<std::string> out;
  std::string current;
  const auto flush = [&] {
    if (current.empty()) return;
    const bool mask = rules.strip_masks && current.size() >= 2 &&
                      current.find_first_not_of('x') == std::string::npos;
    if (!mask && current.size() >= rules.min_length && rules.stopwords.count(current) == 0) {
      out.push_back(current);
    }
    current.clear();
  };
  for (const char ch : text) {
    const unsigned char u = static_cast<unsigned char>(ch);
    if (std::isalpha(u)) {
      current.push_back(static_cast<char>(std::tolower(u)));
    } else {
      flush();
    }
  }
  flush();
  return out;
}

Corpus build_corpus(const std::vector<std::vector<std::string>>& token_lists, int min_df,
                    double max_df_fraction, int max_vocab) {
  if (min_df < 1) raise(Errc::bad_config, "min_df must be at least 1");
  if (!(max_df_fraction > 0.0) || max_df_fraction > 1.0) {
    raise(Errc::bad_config, "max_df_fraction must lie in (0, 1]");
  }
  if (max_vocab < 1) raise(Errc::bad_config, "max_vocab must be at least 1");
  if (token_lists.empty()) raise(Errc::empty_corpus, "no documents");

  struct WordStats {
    int doc_freq = 0;
    long long corpus_freq = 0;
  };
  std::map<std::string, WordStats> stats;
  for (const auto& doc : token_lists) {
    std::map<std::string, int> local;
    for (const std::string& word : doc) ++local[word];
    for (const auto& [word, count] : local) {
      WordStats& s = stats[word];
      s.doc_freq += 1;
      s.corpus_freq += count;
    }
  }

  const double df_cap = max_df_fraction * static_cast<double>(token_lists.size());
  std::vector<std::pair<std::string, WordStats>> eligible;
  for (const auto& [word, s] : stats) {
    if (s.doc_freq >= min_df && static_cast<double>(s.doc_freq) <= df_cap) {
      eligible.emplace_back(word, s);
    }
  }
  std::sort(eligible.begin(), eligible.end(), [](const auto& a, const auto& b) {
    if (a.second.corpus_freq != b.second.corpus_freq) {
      return a.second.corpus_freq > b.second.corpus_freq;
    }
    return a.first < b.first;
  });
  if (eligible.size() > static_cast<std::size_t>(max_vocab)) {
    eligible.resize(static_cast<std::size_t>(max_vocab));
  }

  Corpus corpus;
  for (const auto& [word, s] : eligible) {
    corpus.vocabulary.ids.emplace(word, corpus.vocabulary.size());
    corpus.vocabulary.words.push_back(word);
    corpus.vocabulary.doc_freq.push_back(s.doc_freq);
  }

  corpus.documents.reserve(token_lists.size());
  for (const auto& doc : token_lists) {
    std::vector<int> mapped;
    for (const std::string& word : doc) {
      const auto it = corpus.vocabulary.ids.find(word);
      if (it != corpus.vocabulary.ids.end()) mapped.push_back(it->second);
    }
    corpus.total_tokens += mapped.size();
    corpus.documents.push_back(std::move(mapped));
  }
  if (corpus.total_tokens == 0) {
    raise(Errc::empty_corpus, "no tokens survive the vocabulary filters");
  }
  return corpus;
}

void LdaConfig::validate() const {
  if (topics < 1) raise(Errc::bad_config, "topic count must be at least 1");
  if (alpha < 0.0 || !(beta > 0.0) || sweeps < 0) {
    raise(Errc::bad_config, "alpha must be >= 0, beta > 0, sweeps >= 0");
  }
}

LdaSampler::LdaSampler(const Corpus& corpus, const LdaConfig& config) : corpus_(&corpus) {
  config.validate();
  if (corpus.doc_count() == 0 || corpus.total_tokens == 0 || corpus.vocabulary.size() == 0) {
    raise(Errc::empty_corpus, "cannot fit topics on an empty corpus");
  }
  topics_ = config.topics;
  alpha_ = config.resolved_alpha();
  beta_ = config.beta;
  rng_.seed(config.seed);

  const Eigen::Index d_count = static_cast<Eigen::Index>(corpus.doc_count());
  doc_topic_ = Eigen::MatrixXi::Zero(d_count, topics_);
  topic_word_ = Eigen::MatrixXi::Zero(topics_, corpus.vocabulary.size());
  topic_total_ = Eigen::VectorXi::Zero(topics_);

  assignments_.resize(corpus.doc_count());
  for (std::size_t d = 0; d < corpus.doc_count(); ++d) {
    const std::vector<int>& doc = corpus.documents[d];
    assignments_[d].resize(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const int k = static_cast<int>(uniform_below(rng_, static_cast<std::uint64_t>(topics_)));
      assignments_[d][i] = k;
      doc_topic_(static_cast<Eigen::Index>(d), k) += 1;
      topic_word_(k, doc[i]) += 1;
      topic_total_(k) += 1;
    }
  }
}

void LdaSampler::sweep() {
  const double vbeta = static_cast<double>(corpus_->vocabulary.size()) * beta_;
  std::vector<double> cumulative(static_cast<std::size_t>(topics_));

  for (std::size_t d = 0; d < corpus_->doc_count(); ++d) {
    const Eigen::Index row = static_cast<Eigen::Index>(d);
    const std::vector<int>& doc = corpus_->documents[d];
    std::vector<int>& z = assignments_[d];
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const int w = doc[i];
      const int old_k = z[i];
      doc_topic_(row, old_k) -= 1;
      topic_word_(old_k, w) -= 1;
      topic_total_(old_k) -= 1;

      double total = 0.0;
      for (int k = 0; k < topics_; ++k) {
        total += (doc_topic_(row, k) + alpha_) * (topic_word_(k, w) + beta_) /
                 (topic_total_(k) + vbeta);
        cumulative[static_cast<std::size_t>(k)] = total;
      }
      const double u = uniform_unit(rng_) * total;
      int next = 0;
      while (next + 1 < topics_ && cumulative[static_cast<std::size_t>(next)] <= u) ++next;

      doc_topic_(row, next) += 1;
      topic_word_(next, w) += 1;
      topic_total_(next) += 1;
      z[i] = next;
    }
  }
  ++sweeps_done_;
}

double LdaSampler::log_likelihood() const {
  const int v = corpus_->vocabulary.size();
  const double vbeta = v * beta_;
  const double kalpha = topics_ * alpha_;

  double ll = topics_ * (std::lgamma(vbeta) - v * std::lgamma(beta_));
  for (int k = 0; k < topics_; ++k) {
    for (int w = 0; w < v; ++w) ll += std::lgamma(topic_word_(k, w) + beta_);
    ll -= std::lgamma(topic_total_(k) + vbeta);
  }
  ll += static_cast<double>(corpus_->doc_count()) *
        (std::lgamma(kalpha) - topics_ * std::lgamma(alpha_));
  for (std::size_t d = 0; d < corpus_->doc_count(); ++d) {
    const Eigen::Index row = static_cast<Eigen::Index>(d);
    for (int k = 0; k < topics_; ++k) ll += std::lgamma(doc_topic_(row, k) + alpha_);
    ll -= std::lgamma(static_cast<double>(corpus_->documents[d].size()) + kalpha);
  }
  return ll;
}

TopicModel LdaSampler::finish() const {
  const int v = corpus_->vocabulary.size();
  const double vbeta = v * beta_;
  const double kalpha = topics_ * alpha_;

  TopicModel model;
  model.phi.resize(topics_, v);
  for (int k = 0; k < topics_; ++k) {
    const double denom = topic_total_(k) + vbeta;
    for (int w = 0; w < v; ++w) model.phi(k, w) = (topic_word_(k, w) + beta_) / denom;
  }
  model.theta.resize(static_cast<Eigen::Index>(corpus_->doc_count()), topics_);
  for (std::size_t d = 0; d < corpus_->doc_count(); ++d) {
    const Eigen::Index row = static_cast<Eigen::Index>(d);
    const double denom = static_cast<double>(corpus_->documents[d].size()) + kalpha;
    for (int k = 0; k < topics_; ++k) model.theta(row, k) = (doc_topic_(row, k) + alpha_) / denom;
  }
  model.doc_topic = doc_topic_;
  model.topic_word = topic_word_;
  model.topic_total = topic_total_;
  model.assignments = assignments_;
  model.vocabulary_words = corpus_->vocabulary.words;
  model.alpha = alpha_;
  model.beta = beta_;
  model.log_likelihood = log_likelihood();
  return model;
}

TopicModel fit_lda(const Corpus& corpus, const LdaConfig& config) {
  LdaSampler sampler(corpus, config);
  for (int s = 0; s < config.sweeps; ++s) sampler.sweep();
  return sampler.finish();
}

std::vector<std::pair<std::string, double>> top_words(const TopicModel& model, int topic, int n) {
  if (topic < 0 || topic >= model.topic_count()) {
    raise(Errc::bad_topic, "topic " + std::to_string(topic) + " out of range [0, " +
                               std::to_string(model.topic_count()) + ")");
  }
  std::vector<std::pair<std::string, double>> ranked;
  ranked.reserve(static_cast<std::size_t>(model.vocab_size()));
  for (int w = 0; w < model.vocab_size(); ++w) {
    ranked.emplace_back(model.vocabulary_words[static_cast<std::size_t>(w)], model.phi(topic, w));
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  const std::size_t keep = std::min<std::size_t>(std::max(n, 0), ranked.size());
  ranked.resize(keep);
  return ranked;
}

double perplexity(const TopicModel& model, const Corpus& corpus) {
  if (corpus.doc_count() == 0 || corpus.total_tokens == 0) {
    raise(Errc::empty_corpus, "perplexity needs a non-empty corpus");
  }
  if (static_cast<Eigen::Index>(corpus.doc_count()) != model.theta.rows()) {
    raise(Errc::length_mismatch, "corpus and model disagree on document count");
  }
  double ll = 0.0;
  for (std::size_t d = 0; d < corpus.doc_count(); ++d) {
    const Eigen::Index row = static_cast<Eigen::Index>(d);
    for (const int w : corpus.documents[d]) {
      if (w < 0 || w >= model.vocab_size()) {
        raise(Errc::id_out_of_range, "token id outside the model vocabulary");
      }
      double p = 0.0;
      for (int k = 0; k < model.topic_count(); ++k) p += model.theta(row, k) * model.phi(k, w);
      ll += std::log(p);
    }
  }
  return std::exp(-ll / static_cast<double>(corpus.total_tokens));
}

Eigen::VectorXd infer_document(const TopicModel& model, const std::vector<std::string>& tokens,
                               int sweeps, std::uint64_t seed) {
  const int k_count = model.topic_count();
  std::map<std::string, int> ids;
  for (std::size_t w = 0; w < model.vocabulary_words.size(); ++w) {
    ids.emplace(model.vocabulary_words[w], static_cast<int>(w));
  }
  std::vector<int> doc;
  for (const std::string& token : tokens) {
    const auto it = ids.find(token);
    if (it != ids.end()) doc.push_back(it->second);
  }
  if (doc.empty()) {
    return Eigen::VectorXd::Constant(k_count, 1.0 / static_cast<double>(k_count));
  }

  Rng gen(seed);
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(k_count);
  std::vector<int> z(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    z[i] = static_cast<int>(uniform_below(gen, static_cast<std::uint64_t>(k_count)));
    counts[z[i]] += 1;
  }

  std::vector<double> cumulative(static_cast<std::size_t>(k_count));
  for (int s = 0; s < sweeps; ++s) {
    for (std::size_t i = 0; i < doc.size(); ++i) {
      const int w = doc[i];
      counts[z[i]] -= 1;
      double total = 0.0;
      for (int k = 0; k < k_count; ++k) {
        total += (counts[k] + model.alpha) * model.phi(k, w);
        cumulative[static_cast<std::size_t>(k)] = total;
      }
      const double u = uniform_unit(gen) * total;
      int next = 0;
      while (next + 1 < k_count && cumulative[static_cast<std::size_t>(next)] <= u) ++next;
      counts[next] += 1;
      z[i] = next;
    }
  }

  const double denom = static_cast<double>(doc.size()) + k_count * model.alpha;
  Eigen::VectorXd theta(k_count);
  for (int k = 0; k < k_count; ++k) theta[k] = (counts[k] + model.alpha) / denom;
  return theta;
}

}  // namespace finsight::topics
