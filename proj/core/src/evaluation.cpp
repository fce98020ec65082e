#include "tempq/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tempq/error.hpp"

namespace tempq {

using nlohmann::json;

std::vector<BenchmarkQuestion> parse_benchmark(std::string_view text) {
  std::vector<BenchmarkQuestion> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "benchmark line " + std::to_string(lineno);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(where + ": invalid JSON: " + e.what());
    }
    BenchmarkQuestion q;
    try {
      q.id = rec.at("id").is_string() ? rec.at("id").get<std::string>() : rec.at("id").dump();
      q.question = rec.at("question").get<std::string>();
      for (const auto& a : rec.at("answers")) {
        q.answers.insert(a.is_string() ? a.get<std::string>() : a.dump());
      }
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
    if (q.question.empty()) throw ParseError(where + " (" + q.id + "): empty question");
    if (q.answers.empty()) throw ParseError(where + " (" + q.id + "): no gold answers");
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<BenchmarkQuestion> load_benchmark(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open benchmark file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_benchmark(buf.str());
}

QuestionReport score_question(const BenchmarkQuestion& q, const AnswerSet& predicted,
                              const std::optional<std::string>& selected_answer,
                              std::string selected_query) {
  QuestionReport r;
  r.id = q.id;
  r.question = q.question;
  const Scores s = f1_score(predicted, q.answers);
  r.precision = s.precision;
  r.recall = s.recall;
  r.f1 = s.f1;
  r.hit_at_1 = selected_answer && q.answers.count(*selected_answer) ? 1.0 : 0.0;
  r.selected_query = std::move(selected_query);
  r.selected_answer = selected_answer;
  r.answers = predicted;
  return r;
}

AggregateScores aggregate(const std::vector<QuestionReport>& questions) {
  AggregateScores a;
  a.count = questions.size();
  if (questions.empty()) return a;
  for (const auto& q : questions) {
    a.hit_at_1 += q.hit_at_1;
    a.precision += q.precision;
    a.recall += q.recall;
    a.f1 += q.f1;
  }
  const double n = static_cast<double>(questions.size());
  a.hit_at_1 /= n;
  a.precision /= n;
  a.recall /= n;
  a.f1 /= n;
  return a;
}

EvalReport evaluate(const KnowledgeGraph& g, const std::vector<BenchmarkQuestion>& benchmark,
                    const ScorerModel& model, const PipelineOptions& options) {
  EvalReport report;
  for (const auto& q : benchmark) {
    const AnswerResult r = answer_question(g, q.question, model, options);
    report.questions.push_back(
        score_question(q, r.answers, r.selected_answer, r.selected_query));
  }
  report.aggregate = aggregate(report.questions);
  return report;
}

std::string to_json(const EvalReport& report) {
  json questions = json::array();
  for (const auto& q : report.questions) {
    questions.push_back({{"id", q.id},
                         {"question", q.question},
                         {"hit_at_1", q.hit_at_1},
                         {"precision", q.precision},
                         {"recall", q.recall},
                         {"f1", q.f1},
                         {"selected_query", q.selected_query},
                         {"selected_answer", q.selected_answer ? json(*q.selected_answer) : json()},
                         {"answers", q.answers}});
  }
  const auto& a = report.aggregate;
  json doc{{"questions", questions},
           {"aggregate",
            {{"hit_at_1", a.hit_at_1},
             {"precision", a.precision},
             {"recall", a.recall},
             {"f1", a.f1},
             {"count", a.count}}}};
  return doc.dump(2) + "\n";
}

std::string to_table(const EvalReport& report) {
  int width = 4;
  for (const auto& q : report.questions) width = std::max(width, static_cast<int>(q.id.size()));
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s %6s %9s %6s %6s  %s\n", width, "id", "hit@1", "precision",
                "recall", "f1", "answers");
  out << buf;
  for (const auto& q : report.questions) {
    std::string answers;
    for (const auto& a : q.answers) answers += (answers.empty() ? "" : " ") + a;
    if (q.selected_query.empty()) answers = "(unanswerable)";
    std::snprintf(buf, sizeof buf, "%-*s %6.3f %9.3f %6.3f %6.3f  ", width, q.id.c_str(),
                  q.hit_at_1, q.precision, q.recall, q.f1);
    out << buf << answers << "\n";
  }
  const auto& a = report.aggregate;
  std::snprintf(buf, sizeof buf, "%-*s %6.3f %9.3f %6.3f %6.3f  (%zu questions)\n", width, "mean",
                a.hit_at_1, a.precision, a.recall, a.f1, a.count);
  out << buf;
  return out.str();
}

std::vector<TrainingQuestion> training_pool(const KnowledgeGraph& g,
                                            const std::vector<BenchmarkQuestion>& benchmark,
                                            const PipelineOptions& options) {
  std::vector<TrainingQuestion> out;
  for (const auto& q : benchmark) {
    TrainingQuestion tq;
    tq.id = q.id;
    tq.question = q.question;
    tq.gold = q.answers;
    const auto ctx = make_context(g, q.question, options.grounding);
    for (const auto& c : generate_candidates(ctx)) {
      tq.candidates.push_back(
          {serialize(c.graph, g, SerializationMode::kRanking), structures_of(c), c.answers});
    }
    out.push_back(std::move(tq));
  }
  return out;
}

}  // namespace tempq
