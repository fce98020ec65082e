#include "tempq/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tempq/error.hpp"
#include "tempq/text.hpp"

namespace tempq {

using nlohmann::json;

namespace {

constexpr Structure kStructures[] = {Structure::kBasic, Structure::kIS1, Structure::kIS2,
                                     Structure::kIS3,   Structure::kIS4, Structure::kIS5,
                                     Structure::kIS6};

std::string structure_feature(Structure s) { return "is:" + std::string(to_string(s)); }

// Question content words with the alternatives each one may match.
std::vector<std::set<std::string>> question_words(std::string_view question,
                                                  const RankerLexicon& lex) {
  std::vector<std::set<std::string>> out;
  const auto all = text::words(question);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& w = all[i];
    if (lex.stopwords.count(w)) continue;
    std::set<std::string> alts{w};
    if (i == 0) {
      if (auto it = lex.interrogatives.find(w); it != lex.interrogatives.end()) {
        alts.insert(it->second.begin(), it->second.end());
      }
    }
    if (auto it = lex.terms.find(w); it != lex.terms.end()) {
      alts.insert(it->second.begin(), it->second.end());
    }
    out.push_back(std::move(alts));
  }
  return out;
}

}  // namespace

const std::vector<std::string>& ScorerModel::feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n{"bias", "shared", "recall", "precision", "cosine"};
    for (Structure s : kStructures) n.push_back(structure_feature(s));
    return n;
  }();
  return names;
}

void ScorerModel::set_weights(std::map<std::string, double> w) {
  for (const auto& [name, value] : w) {
    const auto& names = feature_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
      throw UsageError("unknown scorer feature '" + name + "'");
    }
    if (!std::isfinite(value)) throw UsageError("scorer weight '" + name + "' is not finite");
  }
  weights_ = std::move(w);
  trained_ = true;
}

ScorerModel ScorerModel::from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw LoadError(std::string("model is not valid JSON: ") + e.what());
  }
  ScorerModel m;
  try {
    if (!doc.at("trained").get<bool>()) return m;
    std::map<std::string, double> w;
    for (const auto& [name, value] : doc.at("weights").items()) w[name] = value.get<double>();
    m.set_weights(std::move(w));
  } catch (const json::exception& e) {
    throw LoadError(std::string("malformed model: ") + e.what());
  } catch (const UsageError& e) {
    throw LoadError(std::string("malformed model: ") + e.what());
  }
  return m;
}

ScorerModel ScorerModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open model file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

std::string ScorerModel::to_json() const {
  json w = json::object();
  for (const auto& [name, value] : weights_) w[name] = value;
  return json{{"trained", trained_}, {"weights", w}}.dump(2) + "\n";
}

void ScorerModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write model file " + path.string());
  out << to_json();
}

std::map<std::string, double> extract_features(std::string_view question,
                                               std::string_view serialization,
                                               const std::vector<Structure>& structures,
                                               const RankerLexicon& terms) {
  const auto qwords = question_words(question, terms);
  const auto sw = terms.content_words(serialization);
  const std::set<std::string> swords(sw.begin(), sw.end());
  std::set<std::string> qterms;
  for (const auto& alts : qwords) qterms.insert(alts.begin(), alts.end());

  std::size_t matched = 0;
  for (const auto& alts : qwords) {
    if (std::any_of(alts.begin(), alts.end(), [&](const auto& a) { return swords.count(a) > 0; })) {
      ++matched;
    }
  }
  std::size_t covered = 0;
  for (const auto& w : swords) covered += qterms.count(w);

  std::map<std::string, double> f;
  for (const auto& name : ScorerModel::feature_names()) f[name] = 0.0;
  f["bias"] = 1.0;
  f["shared"] = static_cast<double>(matched) / 10.0;
  f["recall"] = qwords.empty() ? 0.0 : static_cast<double>(matched) / qwords.size();
  f["precision"] = swords.empty() ? 0.0 : static_cast<double>(covered) / swords.size();
  f["cosine"] = qwords.empty() || swords.empty()
                    ? 0.0
                    : covered / std::sqrt(static_cast<double>(qwords.size() * swords.size()));
  for (Structure s : structures) f[structure_feature(s)] = 1.0;
  return f;
}

double score(const ScorerModel& model, std::string_view question, std::string_view serialization,
             const std::vector<Structure>& structures, const RankerLexicon& terms) {
  const auto f = extract_features(question, serialization, structures, terms);
  if (!model.trained()) return f.at("recall");
  double s = 0.0;
  for (const auto& [name, w] : model.weights()) {
    if (auto it = f.find(name); it != f.end()) s += w * it->second;
  }
  return s;
}

std::vector<Structure> structures_of(const Candidate& c) {
  std::vector<Structure> out;
  for (const auto& t : c.provenance) {
    if (std::find(out.begin(), out.end(), t.structure) == out.end()) out.push_back(t.structure);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ScoredCandidate> rank(const ScorerModel& model, std::string_view question,
                                  std::vector<Candidate> candidates, const KnowledgeGraph& g,
                                  const RankerLexicon& terms) {
  std::vector<ScoredCandidate> out;
  std::vector<std::string> debug;
  out.reserve(candidates.size());
  for (auto& c : candidates) {
    ScoredCandidate sc;
    sc.serialization = serialize(c.graph, g, SerializationMode::kRanking);
    sc.score = score(model, question, sc.serialization, structures_of(c), terms);
    sc.answers = c.answers;
    debug.push_back(serialize(c.graph, g, SerializationMode::kDebug));
    sc.candidate = std::move(c);
    out.push_back(std::move(sc));
  }
  std::vector<std::size_t> order(out.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (out[a].score != out[b].score) return out[a].score > out[b].score;
    if (out[a].serialization != out[b].serialization) {
      return out[a].serialization < out[b].serialization;
    }
    if (debug[a] != debug[b]) return debug[a] < debug[b];
    return a < b;
  });
  std::vector<ScoredCandidate> sorted;
  sorted.reserve(out.size());
  for (auto i : order) sorted.push_back(std::move(out[i]));
  return sorted;
}

std::string_view to_string(ExampleLabel l) {
  switch (l) {
    case ExampleLabel::kPositive: return "POSITIVE";
    case ExampleLabel::kConfusing: return "CONFUSING_NEG";
    case ExampleLabel::kIrrelevant: return "IRRELEVANT_NEG";
  }
  return "?";
}

std::string_view to_string(SamplingMode m) {
  switch (m) {
    case SamplingMode::kFull: return "full";
    case SamplingMode::kNoConfusing: return "no-confusing";
    case SamplingMode::kNoIrrelevant: return "no-irrelevant";
    case SamplingMode::kRandom: return "random";
  }
  return "?";
}

SamplingMode sampling_mode_from_string(std::string_view s) {
  for (auto m : {SamplingMode::kFull, SamplingMode::kNoConfusing, SamplingMode::kNoIrrelevant,
                 SamplingMode::kRandom}) {
    if (to_string(m) == s) return m;
  }
  throw ParseError("unknown sampling mode '" + std::string(s) +
                   "' (expected full, no-confusing, no-irrelevant or random)");
}

std::size_t TrainingSet::count(ExampleLabel l) const {
  return static_cast<std::size_t>(std::count_if(
      examples.begin(), examples.end(), [&](const TrainingExample& e) { return e.label == l; }));
}

namespace {

// Fisher-Yates with an explicit index rule so results do not depend on the
// standard library's distribution implementations.
template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

std::vector<std::size_t> draw(std::vector<std::size_t> pool, std::size_t n, std::mt19937_64& rng) {
  shuffle(pool, rng);
  pool.resize(std::min(n, pool.size()));
  return pool;
}

}  // namespace

TrainingSet build_training_set(const std::vector<TrainingQuestion>& questions,
                               const SamplingOptions& options) {
  TrainingSet set;
  std::mt19937_64 rng(options.seed);
  for (const auto& q : questions) {
    std::vector<TrainingExample> labelled;
    double best = 0.0;
    for (const auto& c : q.candidates) {
      TrainingExample e;
      e.question = q.question;
      e.serialization = c.serialization;
      e.structures = c.structures;
      e.f1 = f1_score(c.answers, q.gold).f1;
      e.intersects_gold = std::any_of(c.answers.begin(), c.answers.end(),
                                      [&](const auto& a) { return q.gold.count(a) > 0; });
      best = std::max(best, e.f1);
      labelled.push_back(std::move(e));
    }
    if (best <= 0.0) {
      set.skipped.push_back(q.id);
      continue;
    }
    std::vector<std::size_t> positives, confusing, irrelevant;
    for (std::size_t i = 0; i < labelled.size(); ++i) {
      auto& e = labelled[i];
      if (e.f1 == best) {
        e.label = ExampleLabel::kPositive;
        positives.push_back(i);
      } else if (e.intersects_gold) {
        e.label = ExampleLabel::kConfusing;
        confusing.push_back(i);
      } else {
        e.label = ExampleLabel::kIrrelevant;
        irrelevant.push_back(i);
      }
    }
    const std::size_t n = options.negatives_per_positive * positives.size();
    std::vector<std::size_t> chosen;
    switch (options.mode) {
      case SamplingMode::kFull: {
        std::size_t want_c = n / 2;
        std::size_t want_i = n - want_c;
        if (confusing.size() < want_c) want_i += want_c - confusing.size();
        if (irrelevant.size() < want_i) want_c += want_i - irrelevant.size();
        auto c = draw(confusing, want_c, rng);
        auto i = draw(irrelevant, want_i, rng);
        chosen.insert(chosen.end(), c.begin(), c.end());
        chosen.insert(chosen.end(), i.begin(), i.end());
        break;
      }
      case SamplingMode::kNoConfusing:
        chosen = draw(irrelevant, n, rng);
        break;
      case SamplingMode::kNoIrrelevant:
        chosen = draw(confusing, n, rng);
        break;
      case SamplingMode::kRandom: {
        std::vector<std::size_t> all = confusing;
        all.insert(all.end(), irrelevant.begin(), irrelevant.end());
        std::sort(all.begin(), all.end());
        chosen = draw(all, n, rng);
        break;
      }
    }
    std::sort(chosen.begin(), chosen.end());
    for (auto i : positives) set.examples.push_back(labelled[i]);
    for (auto i : chosen) set.examples.push_back(labelled[i]);
  }
  return set;
}

ScorerModel train(const std::vector<TrainingExample>& examples, const TrainOptions& options,
                  const RankerLexicon& terms) {
  const bool any_positive = std::any_of(examples.begin(), examples.end(), [](const auto& e) {
    return e.label == ExampleLabel::kPositive;
  });
  if (!any_positive) throw UsageError("training set has no positive example");

  // Pairs of (positive, negative) drawn from the same question: only
  // differences within a question matter for ranking.
  const auto& names = ScorerModel::feature_names();
  std::map<std::string, std::pair<std::vector<std::vector<double>>, std::vector<std::vector<double>>>>
      by_question;
  for (const auto& e : examples) {
    const auto f = extract_features(e.question, e.serialization, e.structures, terms);
    std::vector<double> row;
    for (const auto& n : names) row.push_back(f.at(n));
    auto& [pos, neg] = by_question[e.question];
    (e.label == ExampleLabel::kPositive ? pos : neg).push_back(std::move(row));
  }
  std::vector<std::vector<double>> diffs;
  for (const auto& [q, sides] : by_question) {
    for (const auto& p : sides.first) {
      for (const auto& n : sides.second) {
        std::vector<double> d(names.size());
        for (std::size_t k = 0; k < d.size(); ++k) d[k] = p[k] - n[k];
        diffs.push_back(std::move(d));
      }
    }
  }

  std::vector<double> w(names.size(), 0.0);
  if (!diffs.empty()) {
    const double scale = 1.0 / static_cast<double>(diffs.size());
    for (int step = 0; step < options.steps; ++step) {
      std::vector<double> grad(w.size(), 0.0);
      for (const auto& d : diffs) {
        double z = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) z += w[k] * d[k];
        // d/dz of log(1 + exp(-z))
        const double g = -1.0 / (1.0 + std::exp(z));
        for (std::size_t k = 0; k < w.size(); ++k) grad[k] += g * d[k];
      }
      for (std::size_t k = 0; k < w.size(); ++k) w[k] -= options.learning_rate * grad[k] * scale;
    }
  }

  std::map<std::string, double> weights;
  for (std::size_t k = 0; k < names.size(); ++k) weights[names[k]] = w[k];
  ScorerModel m;
  m.set_weights(std::move(weights));
  return m;
}

}  // namespace tempq
