#include "cacesim/types.hpp"

namespace cacesim {

std::string_view to_string(Language lang) {
  switch (lang) {
    case Language::Java: return "java";
    case Language::Python: return "python";
    case Language::Cpp: return "cpp";
    case Language::C: return "c";
    case Language::Go: return "go";
    case Language::Rust: return "rust";
    case Language::CSharp: return "csharp";
    case Language::JavaScript: return "javascript";
  }
  throw SimError("invalid language value");
}

Language language_from_string(std::string_view s) {
  for (Language lang : kAllLanguages) {
    if (s == to_string(lang)) return lang;
  }
  throw ParseError("unknown language: " + std::string(s));
}

std::string_view to_string(TaskClass tc) {
  switch (tc) {
    case TaskClass::Completion: return "completion";
    case TaskClass::Reasoning: return "reasoning";
  }
  throw SimError("invalid task class value");
}

TaskClass task_class_from_string(std::string_view s) {
  for (TaskClass tc : kAllTaskClasses) {
    if (s == to_string(tc)) return tc;
  }
  throw ParseError("unknown task class: " + std::string(s));
}

std::string_view to_string(PatternName p) {
  switch (p) {
    case PatternName::Uniform: return "uniform";
    case PatternName::IdeHeavy: return "ide-heavy";
    case PatternName::PopularitySkewed: return "popularity-skewed";
  }
  throw SimError("invalid pattern value");
}

PatternName pattern_from_string(std::string_view s) {
  if (s == "uniform") return PatternName::Uniform;
  if (s == "ide-heavy") return PatternName::IdeHeavy;
  if (s == "popularity-skewed") return PatternName::PopularitySkewed;
  throw ParseError("unknown pattern: " + std::string(s));
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Lru: return "lru";
    case Variant::CaceFull: return "cace";
    case Variant::CaceMinusP1: return "cace-p1";
    case Variant::CaceMinusP2: return "cace-p2";
    case Variant::CaceMinusP3: return "cace-p3";
    case Variant::CaceMinusP4: return "cace-p4";
  }
  throw SimError("invalid variant value");
}

Variant variant_from_string(std::string_view s) {
  if (s == "lru") return Variant::Lru;
  if (s == "cace") return Variant::CaceFull;
  if (s == "cace-p1") return Variant::CaceMinusP1;
  if (s == "cace-p2") return Variant::CaceMinusP2;
  if (s == "cace-p3") return Variant::CaceMinusP3;
  if (s == "cace-p4") return Variant::CaceMinusP4;
  throw ParseError("unknown policy variant: " + std::string(s));
}

}  // namespace cacesim
