#include "tempq/lexicon.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tempq/error.hpp"
#include "tempq/text.hpp"

namespace tempq {

using nlohmann::json;

std::string_view to_string(OrdinalDirection d) {
  return d == OrdinalDirection::kFromFirst ? "FROM_FIRST" : "FROM_LAST";
}

namespace {

std::set<std::string> string_set(const json& doc, const char* key) {
  std::set<std::string> out;
  if (!doc.contains(key)) return out;
  for (const auto& v : doc.at(key)) out.insert(v.get<std::string>());
  return out;
}

// {"lemma": ["form", ...]} inverted to form -> lemma.
std::map<std::string, std::string> inverted_forms(const json& doc, const char* key) {
  std::map<std::string, std::string> out;
  if (!doc.contains(key)) return out;
  for (const auto& [lemma, forms] : doc.at(key).items()) {
    for (const auto& f : forms) out.emplace(f.get<std::string>(), lemma);
  }
  return out;
}

TimeMLRelType reltype(const json& v, const std::string& where) {
  const auto name = v.get<std::string>();
  const auto r = reltype_from_string(name);
  if (!r) throw ParseError("lexicon: unknown reltype '" + name + "' in " + where);
  return *r;
}

}  // namespace

Lexicon Lexicon::from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("lexicon: ") + e.what());
  }
  Lexicon lex;
  lex.determiners = string_set(doc, "determiners");
  lex.auxiliaries = string_set(doc, "auxiliaries");
  lex.pronouns = string_set(doc, "pronouns");
  lex.prepositions = string_set(doc, "prepositions");
  lex.conjunctions = string_set(doc, "conjunctions");
  lex.interrogatives = string_set(doc, "interrogatives");
  lex.verbs = inverted_forms(doc, "verbs");
  lex.eventive_nouns = inverted_forms(doc, "eventive_nouns");
  if (doc.contains("ordinals")) {
    for (const auto& [word, entry] : doc.at("ordinals").items()) {
      OrdinalEntry o;
      o.rank = entry.at("rank").get<int>();
      if (o.rank < 1) throw ParseError("lexicon: ordinal '" + word + "' has rank < 1");
      o.direction = entry.value("direction", std::string("FROM_FIRST")) == "FROM_LAST"
                        ? OrdinalDirection::kFromLast
                        : OrdinalDirection::kFromFirst;
      lex.ordinals.emplace(word, o);
    }
  }
  if (doc.contains("signals")) {
    for (const auto& [word, entry] : doc.at("signals").items()) {
      SignalEntry s{reltype(entry.at("event"), "signal '" + word + "'"),
                    reltype(entry.at("timex"), "signal '" + word + "'"),
                    entry.value("needs_anchor", false)};
      lex.signals.emplace(word, s);
    }
  }
  if (doc.contains("months")) {
    for (const auto& [word, n] : doc.at("months").items()) lex.months.emplace(word, n.get<unsigned>());
  }
  return lex;
}

Lexicon Lexicon::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open lexicon file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

const Lexicon& Lexicon::defaults() {
  static const Lexicon lex = from_json(resources::default_lexicon_json());
  return lex;
}

bool Lexicon::is_closed_class(const std::string& lower) const {
  return determiners.count(lower) || auxiliaries.count(lower) || pronouns.count(lower) ||
         prepositions.count(lower) || conjunctions.count(lower) || interrogatives.count(lower);
}

RankerLexicon RankerLexicon::from_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("synonyms: ") + e.what());
  }
  RankerLexicon lex;
  lex.stopwords = string_set(doc, "stopwords");
  for (const char* key : {"interrogatives", "terms"}) {
    if (!doc.contains(key)) continue;
    auto& target = std::string_view(key) == "terms" ? lex.terms : lex.interrogatives;
    for (const auto& [word, list] : doc.at(key).items()) {
      target[word] = list.get<std::vector<std::string>>();
    }
  }
  return lex;
}

const RankerLexicon& RankerLexicon::defaults() {
  static const RankerLexicon lex = from_json(resources::default_synonyms_json());
  return lex;
}

std::vector<std::string> RankerLexicon::content_words(std::string_view s) const {
  std::vector<std::string> out;
  for (auto& w : text::words(s)) {
    if (!stopwords.count(w)) out.push_back(std::move(w));
  }
  return out;
}

std::set<std::string> RankerLexicon::question_terms(std::string_view question) const {
  std::set<std::string> out;
  const auto all = text::words(question);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& w = all[i];
    if (stopwords.count(w)) continue;
    out.insert(w);
    if (i == 0) {
      if (auto it = interrogatives.find(w); it != interrogatives.end()) {
        out.insert(it->second.begin(), it->second.end());
      }
    }
    if (auto it = terms.find(w); it != terms.end()) out.insert(it->second.begin(), it->second.end());
  }
  return out;
}

}  // namespace tempq
