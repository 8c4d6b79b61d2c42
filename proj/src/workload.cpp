#include "cacesim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace cacesim {

using ordered_json = nlohmann::ordered_json;

WorkloadPattern WorkloadPattern::get(PatternName name) {
  WorkloadPattern p;
  p.name = name;
  switch (name) {
    case PatternName::Uniform:
      p.task_mix = {{TaskClass::Completion, 0.5}, {TaskClass::Reasoning, 0.5}};
      break;
    case PatternName::IdeHeavy:
    case PatternName::PopularitySkewed:
      p.task_mix = {{TaskClass::Completion, 0.7}, {TaskClass::Reasoning, 0.3}};
      break;
  }
  if (name == PatternName::PopularitySkewed) {
    p.language_mix = {{Language::Java, 0.2},   {Language::Python, 0.2},
                      {Language::Cpp, 0.2},    {Language::JavaScript, 0.2},
                      {Language::Go, 0.05},    {Language::Rust, 0.05},
                      {Language::C, 0.05},     {Language::CSharp, 0.05}};
  } else {
    for (Language lang : kAllLanguages) p.language_mix[lang] = 1.0 / 8.0;
  }
  return p;
}

std::vector<double> generate_arrivals(double rate, double duration,
                                      std::uint64_t seed) {
  if (rate <= 0) throw SimError("generate_arrivals: rate must be positive");
  if (duration < 0) {
    throw SimError("generate_arrivals: duration must be non-negative");
  }
  Rng rng(seed);
  std::vector<double> times;
  double t = 0.0;
  for (;;) {
    double gap = rng.exponential(rate);
    if (gap <= 0) continue;  // keeps the sequence strictly increasing
    t += gap;
    if (t > duration) break;
    times.push_back(t);
  }
  return times;
}

namespace {

// Largest-remainder apportionment of n items over the given fractions.
std::vector<std::size_t> largest_remainder(std::size_t n,
                                           const std::vector<double>& fracs) {
  std::vector<std::size_t> counts(fracs.size(), 0);
  std::vector<double> remainders(fracs.size(), 0.0);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < fracs.size(); ++i) {
    double exact = static_cast<double>(n) * fracs[i];
    counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainders[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(fracs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainders[a] > remainders[b];
  });
  for (std::size_t k = 0; assigned < n; ++k) {
    counts[order[k % order.size()]] += 1;
    assigned += 1;
  }
  return counts;
}

}  // namespace

std::vector<std::pair<Language, TaskClass>> assign_labels(
    std::size_t n, const WorkloadPattern& pattern, std::uint64_t seed) {
  // Split by task class first so the per-task totals are exact, then by
  // language within each task.
  std::vector<double> task_fracs;
  for (TaskClass tc : kAllTaskClasses) task_fracs.push_back(pattern.task_mix.at(tc));
  auto task_counts = largest_remainder(n, task_fracs);

  std::vector<std::pair<Language, TaskClass>> labels;
  labels.reserve(n);
  for (std::size_t ti = 0; ti < kAllTaskClasses.size(); ++ti) {
    TaskClass tc = kAllTaskClasses[ti];
    std::vector<double> lang_fracs;
    for (Language lang : kAllLanguages) {
      lang_fracs.push_back(pattern.language_mix.at(lang));
    }
    auto lang_counts = largest_remainder(task_counts[ti], lang_fracs);
    for (std::size_t li = 0; li < kAllLanguages.size(); ++li) {
      for (std::size_t k = 0; k < lang_counts[li]; ++k) {
        labels.emplace_back(kAllLanguages[li], tc);
      }
    }
  }
  Rng rng(derive_seed(seed, 2));
  rng.shuffle(labels);
  return labels;
}

namespace {

int sample_output_tokens(Rng& rng, int mean, double sigma) {
  // lognormal with the requested mean: mu = ln(mean) - sigma^2 / 2
  double u1 = rng.uniform();
  double u2 = rng.uniform();
  while (u1 <= 0) u1 = rng.uniform();
  double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  double mu = std::log(static_cast<double>(mean)) - sigma * sigma / 2.0;
  return std::max(1, static_cast<int>(std::lround(std::exp(mu + sigma * z))));
}

}  // namespace

Trace build_trace(PatternName pattern_name, double rate, double duration,
                  std::uint64_t seed, const ModelCatalog& catalog,
                  const TokenParams& tokens, int windows) {
  if (windows < 1) throw SimError("build_trace: windows must be >= 1");
  WorkloadPattern pattern = WorkloadPattern::get(pattern_name);
  for (const auto& [lang, frac] : pattern.language_mix) {
    if (frac > 0) {
      for (TaskClass tc : kAllTaskClasses) {
        if (pattern.task_mix.at(tc) > 0 && !catalog.contains(lang, tc)) {
          throw SimError("build_trace: catalog cannot resolve (" +
                         std::string(to_string(lang)) + ", " +
                         std::string(to_string(tc)) + ")");
        }
      }
    }
  }

  std::vector<double> arrivals;
  for (int w = 0; w < windows; ++w) {
    auto part = generate_arrivals(rate, duration,
                                  derive_seed(seed, 100 + static_cast<std::uint64_t>(w)));
    for (double t : part) arrivals.push_back(t + w * duration);
  }
  auto labels = assign_labels(arrivals.size(), pattern, seed);

  Rng token_rng(derive_seed(seed, 3));
  Trace trace;
  trace.pattern = pattern_name;
  trace.seed = seed;
  trace.window_duration_s = duration;
  trace.arrival_rate_per_s = rate;
  trace.windows = windows;
  trace.requests.reserve(arrivals.size());
  for (std::size_t i = 0; i < arrivals.size(); ++i) {
    Request r;
    r.request_id = i;
    r.arrival_time_s = arrivals[i];
    r.language = labels[i].first;
    r.task_class = labels[i].second;
    const bool completion = (r.task_class == TaskClass::Completion);
    r.prompt_tokens = completion ? tokens.completion_prompt_tokens
                                 : tokens.reasoning_prompt_tokens;
    int out = completion ? tokens.completion_output_tokens
                         : tokens.reasoning_output_tokens;
    if (tokens.sample_output_tokens) {
      out = sample_output_tokens(token_rng, out, tokens.output_sigma);
    }
    if (completion) out = std::min(out, tokens.completion_output_cap);
    r.output_tokens = std::max(1, out);
    trace.requests.push_back(r);
  }
  return trace;
}

std::string serialize_trace(const Trace& trace) {
  std::ostringstream out;
  ordered_json header;
  header["trace_version"] = 1;
  header["pattern"] = to_string(trace.pattern);
  header["seed"] = trace.seed;
  header["rate"] = trace.arrival_rate_per_s;
  header["duration"] = trace.window_duration_s;
  header["windows"] = trace.windows;
  out << header.dump() << "\n";
  for (const auto& r : trace.requests) {
    ordered_json rec;
    rec["request_id"] = r.request_id;
    rec["arrival_time_s"] = r.arrival_time_s;
    rec["language"] = to_string(r.language);
    rec["task_class"] = to_string(r.task_class);
    rec["prompt_tokens"] = r.prompt_tokens;
    rec["output_tokens"] = r.output_tokens;
    out << rec.dump() << "\n";
  }
  return out.str();
}

Trace parse_trace(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  Trace trace;
  bool have_header = false;
  double max_time = 0.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json rec;
    try {
      rec = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("trace line " + std::to_string(line_no) +
                       ": invalid JSON: " + e.what());
    }
    try {
      if (!have_header) {
        if (!rec.contains("trace_version")) {
          throw ParseError("trace line 1: missing trace_version header");
        }
        if (rec.at("trace_version").get<int>() != 1) {
          throw ParseError("trace: unsupported trace_version");
        }
        trace.pattern = pattern_from_string(rec.at("pattern").get<std::string>());
        trace.seed = rec.at("seed").get<std::uint64_t>();
        trace.arrival_rate_per_s = rec.at("rate").get<double>();
        trace.window_duration_s = rec.at("duration").get<double>();
        trace.windows = rec.value("windows", 1);
        have_header = true;
        continue;
      }
      Request r;
      r.request_id = rec.at("request_id").get<std::uint64_t>();
      r.arrival_time_s = rec.at("arrival_time_s").get<double>();
      r.language = language_from_string(rec.at("language").get<std::string>());
      r.task_class =
          task_class_from_string(rec.at("task_class").get<std::string>());
      r.prompt_tokens = rec.at("prompt_tokens").get<int>();
      r.output_tokens = rec.at("output_tokens").get<int>();
      if (r.arrival_time_s < 0) {
        throw ParseError("trace line " + std::to_string(line_no) +
                         ": negative arrival_time_s");
      }
      if (r.prompt_tokens <= 0 || r.output_tokens <= 0) {
        throw ParseError("trace line " + std::to_string(line_no) +
                         ": token counts must be positive");
      }
      if (r.arrival_time_s < max_time) {
        throw ParseError("trace line " + std::to_string(line_no) +
                         ": arrivals out of order");
      }
      max_time = r.arrival_time_s;
      trace.requests.push_back(r);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("trace line " + std::to_string(line_no) +
                       ": missing or mistyped field: " + e.what());
    }
  }
  if (!have_header) throw ParseError("trace: missing header line");
  return trace;
}

void save_trace(const Trace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SimError("trace: cannot open for writing: " + path);
  out << serialize_trace(trace);
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SimError("trace: cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_trace(ss.str());
}

}  // namespace cacesim
