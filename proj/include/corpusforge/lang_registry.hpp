// Copyright 2026 The corpusforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Language tags of the form FAMILY+code_Script, the bundled 38-entry
// registry, and block-based script detection.

#ifndef CORPUSFORGE_LANG_REGISTRY_HPP_
#define CORPUSFORGE_LANG_REGISTRY_HPP_

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "corpusforge/error.hpp"
#include "corpusforge/unicode.hpp"

namespace corpusforge::lang {

enum class Family {
  kMagadhi,
  kWesternIndic,
  kCentralIndic,
  kMaharashtri,
  kVedic,
  kDravidian,
  kTibetoBurman,
  kAustroAsiatic,
  kWestGermanic,
};

inline constexpr std::array<std::pair<Family, std::string_view>, 9> kFamilyNames{{
    {Family::kMagadhi, "Magadhi"},
    {Family::kWesternIndic, "WesternIndic"},
    {Family::kCentralIndic, "CentralIndic"},
    {Family::kMaharashtri, "Maharashtri"},
    {Family::kVedic, "Vedic"},
    {Family::kDravidian, "Dravidian"},
    {Family::kTibetoBurman, "TibetoBurman"},
    {Family::kAustroAsiatic, "AustroAsiatic"},
    {Family::kWestGermanic, "WestGermanic"},
}};

inline std::string_view family_name(Family f) {
  for (const auto& [fam, name] : kFamilyNames) {
    if (fam == f) return name;
  }
  return "?";
}

inline std::optional<Family> family_from_name(std::string_view name) {
  for (const auto& [fam, n] : kFamilyNames) {
    if (n == name) return fam;
  }
  return std::nullopt;
}

struct LanguageTag {
  Family family = Family::kWestGermanic;
  std::string code;
  std::string script;
  // False when (code, script) is not in the registry used for parsing.
  bool registered = true;

  // Identity is the tuple; the registration flag is parse metadata.
  friend bool operator==(const LanguageTag& a, const LanguageTag& b) {
    return a.family == b.family && a.code == b.code && a.script == b.script;
  }
  friend bool operator<(const LanguageTag& a, const LanguageTag& b) {
    return std::tie(a.family, a.code, a.script) < std::tie(b.family, b.code, b.script);
  }

  // code_Script, the lexicon directory name.
  std::string code_script() const { return code + "_" + script; }
};

inline std::string format_tag(const LanguageTag& tag) {
  std::string out(family_name(tag.family));
  out += '+';
  out += tag.code;
  out += '_';
  out += tag.script;
  return out;
}

struct CodePointRange {
  char32_t first;
  char32_t last;
};

struct ScriptInfo {
  std::string_view code;
  std::string_view name;
  std::span<const CodePointRange> blocks;
};

namespace detail {
inline constexpr CodePointRange kLatn[] = {
    {U'A', U'Z'}, {U'a', U'z'}, {0x00C0, 0x00FF}, {0x0100, 0x024F},
    {0x0300, 0x036F}, {0x1E00, 0x1EFF}};
inline constexpr CodePointRange kDeva[] = {{0x0900, 0x097F}, {0xA8E0, 0xA8FF}};
inline constexpr CodePointRange kBeng[] = {{0x0980, 0x09FF}};
inline constexpr CodePointRange kGuru[] = {{0x0A00, 0x0A7F}};
inline constexpr CodePointRange kGujr[] = {{0x0A80, 0x0AFF}};
inline constexpr CodePointRange kOrya[] = {{0x0B00, 0x0B7F}};
inline constexpr CodePointRange kTaml[] = {{0x0B80, 0x0BFF}};
inline constexpr CodePointRange kTelu[] = {{0x0C00, 0x0C7F}};
inline constexpr CodePointRange kKnda[] = {{0x0C80, 0x0CFF}};
inline constexpr CodePointRange kMlym[] = {{0x0D00, 0x0D7F}};
inline constexpr CodePointRange kSinh[] = {{0x0D80, 0x0DFF}};
inline constexpr CodePointRange kArab[] = {{0x0600, 0x06FF}, {0x0750, 0x077F},
                                          {0x08A0, 0x08FF}, {0xFB50, 0xFDFF},
                                          {0xFE70, 0xFEFF}};
inline constexpr CodePointRange kMtei[] = {{0xAAE0, 0xAAFF}, {0xABC0, 0xABFF}};
inline constexpr CodePointRange kOlck[] = {{0x1C50, 0x1C7F}};
inline constexpr CodePointRange kWara[] = {{0x118A0, 0x118FF}};
}  // namespace detail

// Order matters only for breaking ties in dominant_script.
inline constexpr std::array<ScriptInfo, 15> kScripts{{
    {"Latn", "Latin", detail::kLatn},
    {"Deva", "Devanagari", detail::kDeva},
    {"Beng", "Bengali", detail::kBeng},
    {"Guru", "Gurmukhi", detail::kGuru},
    {"Gujr", "Gujarati", detail::kGujr},
    {"Orya", "Odia", detail::kOrya},
    {"Taml", "Tamil", detail::kTaml},
    {"Telu", "Telugu", detail::kTelu},
    {"Knda", "Kannada", detail::kKnda},
    {"Mlym", "Malayalam", detail::kMlym},
    {"Sinh", "Sinhala", detail::kSinh},
    {"Arab", "Arabic", detail::kArab},
    {"Mtei", "Meitei Mayek", detail::kMtei},
    {"Olck", "Ol Chiki", detail::kOlck},
    {"Wara", "Warang Citi", detail::kWara},
}};

// Letters outside every known block are reported under this code.
inline constexpr std::string_view kUnknownScript = "Zzzz";

inline const ScriptInfo* find_script(std::string_view code) {
  for (const auto& s : kScripts) {
    if (s.code == code) return &s;
  }
  return nullptr;
}

// Index into kScripts, or kScripts.size() for an unknown block.
inline std::size_t script_index_of(char32_t c) {
  for (std::size_t i = 0; i < kScripts.size(); ++i) {
    for (const auto& r : kScripts[i].blocks) {
      if (c >= r.first && c <= r.last) return i;
    }
  }
  return kScripts.size();
}

struct ScriptShare {
  std::string script;
  double share = 0.0;  // fraction of letter code points, in [0, 1]
};

// Script covering the largest share of letter code points (combining marks
// included). nullopt means the text has no letters at all, which is not the
// same as a low-confidence answer.
inline std::optional<ScriptShare> dominant_script(std::string_view text) {
  std::array<std::size_t, kScripts.size() + 1> counts{};
  std::size_t letters = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto cp = text::next_code_point(text, pos);
    if (!cp || !text::is_letter(*cp)) continue;
    ++counts[script_index_of(*cp)];
    ++letters;
  }
  if (letters == 0) return std::nullopt;
  const auto best = static_cast<std::size_t>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());
  ScriptShare out;
  out.script = best < kScripts.size() ? std::string(kScripts[best].code)
                                      : std::string(kUnknownScript);
  out.share = static_cast<double>(counts[best]) / static_cast<double>(letters);
  return out;
}

struct LanguageInfo {
  int id = 0;
  LanguageTag tag;
  std::string display_name;
  std::string group;  // same as the family name
  std::vector<CodePointRange> unicode_blocks;
};

inline constexpr std::string_view kRegistryHeader = "# corpusforge language registry";
inline constexpr int kRegistryVersion = 1;

// Bundled table. data/languages.tsv carries the same bytes.
inline constexpr std::string_view kDefaultRegistryTable =
    "# corpusforge language registry\n"
    "version\t1\n"
    "1\tMagadhi\tasm\tBeng\tAssamese (Bengali script)\n"
    "2\tCentralIndic\tawa\tDeva\tAwadhi (Devanagari script)\n"
    "3\tMagadhi\tben\tBeng\tBengali (Bengali script)\n"
    "4\tMagadhi\tbho\tDeva\tBhojpuri (Devanagari script)\n"
    "5\tCentralIndic\tbra\tDeva\tBraj Bhasha (Devanagari script)\n"
    "6\tTibetoBurman\tbrx\tDeva\tBodo (Devanagari script)\n"
    "7\tWesternIndic\tdoi\tDeva\tDogri (Devanagari script)\n"
    "8\tWestGermanic\teng\tLatn\tEnglish (Latin script)\n"
    "9\tMaharashtri\tgom\tDeva\tGoan Konkani (Devanagari script)\n"
    "10\tDravidian\tgon\tDeva\tGondi (Devanagari script)\n"
    "11\tWesternIndic\tguj\tGujr\tGujarati (Gujarati script)\n"
    "12\tCentralIndic\thin\tDeva\tHindi (Devanagari script)\n"
    "13\tCentralIndic\thingh\tDeva\tHinglish (Devanagari script)\n"
    "14\tAustroAsiatic\thoc\tWara\tHo (Warang Citi script)\n"
    "15\tDravidian\tkan\tKnda\tKannada (Kannada script)\n"
    "16\tWesternIndic\tkas\tArab\tKashmiri (Arabic script)\n"
    "17\tWesternIndic\tkas\tDeva\tKashmiri (Devanagari script)\n"
    "18\tAustroAsiatic\tkha\tLatn\tKhasi (Latin script)\n"
    "19\tTibetoBurman\tlus\tLatn\tMizo (Latin script)\n"
    "20\tMagadhi\tmag\tDeva\tMagahi (Devanagari script)\n"
    "21\tMagadhi\tmai\tDeva\tMaithili (Devanagari script)\n"
    "22\tDravidian\tmal\tMlym\tMalayalam (Malayalam script)\n"
    "23\tMaharashtri\tmar\tDeva\tMarathi (Devanagari script)\n"
    "24\tTibetoBurman\tmni\tBeng\tManipuri (Bengali script)\n"
    "25\tTibetoBurman\tmni\tMtei\tMeitei (Meitei script)\n"
    "26\tCentralIndic\tnpi\tDeva\tNepali (Devanagari script)\n"
    "27\tMagadhi\tory\tOrya\tOdia (Odia script)\n"
    "28\tWesternIndic\tpan\tGuru\tPunjabi (Gurmukhi script)\n"
    "29\tVedic\tsan\tDeva\tSanskrit (Devanagari script)\n"
    "30\tAustroAsiatic\tsat\tOlck\tSantali (Ol Chiki script)\n"
    "31\tMaharashtri\tsin\tSinh\tSinhala (Sinhala script)\n"
    "32\tWesternIndic\tsnd\tArab\tSindhi (Arabic script)\n"
    "33\tWesternIndic\tsnd\tDeva\tSindhi (Devanagari script)\n"
    "34\tDravidian\ttam\tTaml\tTamil (Tamil script)\n"
    "35\tDravidian\ttcy\tKnda\tTulu (Kannada script)\n"
    "36\tDravidian\ttel\tTelu\tTelugu (Telugu script)\n"
    "37\tCentralIndic\turd\tArab\tUrdu (Arabic script)\n"
    "38\tCentralIndic\txnr\tDeva\tKangri (Devanagari script)\n";

inline bool valid_code(std::string_view code) {
  if (code.size() < 3 || code.size() > 5) return false;
  return std::all_of(code.begin(), code.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

inline bool valid_script_code(std::string_view s) {
  if (s.size() != 4 || s[0] < 'A' || s[0] > 'Z') return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

class Registry {
 public:
  Registry() = default;

  // Reads the versioned table: a header comment, a "version<TAB>1" line,
  // then id, family, code, script, display name per row.
  static Registry from_table(std::istream& in) {
    Registry reg;
    std::string line;
    int line_no = 0;
    bool saw_version = false;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> cols;
      std::stringstream ss(line);
      std::string col;
      while (std::getline(ss, col, '\t')) cols.push_back(col);
      if (!saw_version) {
        if (cols.size() != 2 || cols[0] != "version" ||
            cols[1] != std::to_string(kRegistryVersion)) {
          throw ParseError("registry line " + std::to_string(line_no) +
                           ": expected 'version\\t" + std::to_string(kRegistryVersion) + "'");
        }
        saw_version = true;
        continue;
      }
      if (cols.size() != 5) {
        throw ParseError("registry line " + std::to_string(line_no) + ": expected 5 columns");
      }
      LanguageInfo info;
      try {
        info.id = std::stoi(cols[0]);
      } catch (const std::exception&) {
        throw ParseError("registry line " + std::to_string(line_no) + ": bad id '" + cols[0] + "'");
      }
      const auto fam = family_from_name(cols[1]);
      if (!fam) {
        throw ParseError("registry line " + std::to_string(line_no) + ": unknown family '" +
                         cols[1] + "'");
      }
      if (!valid_code(cols[2]) || !valid_script_code(cols[3])) {
        throw ParseError("registry line " + std::to_string(line_no) + ": bad code or script");
      }
      info.tag = LanguageTag{*fam, cols[2], cols[3], true};
      info.group = cols[1];
      info.display_name = cols[4];
      if (const auto* script = find_script(cols[3])) {
        info.unicode_blocks.assign(script->blocks.begin(), script->blocks.end());
      }
      reg.add(std::move(info));
    }
    if (!saw_version) throw ParseError("registry table has no version line");
    return reg;
  }

  static Registry from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open language registry '" + path + "'");
    return from_table(in);
  }

  static const Registry& bundled() {
    static const Registry reg = [] {
      std::istringstream in{std::string(kDefaultRegistryTable)};
      return from_table(in);
    }();
    return reg;
  }

  void add(LanguageInfo info) {
    const auto key = std::make_pair(info.tag.code, info.tag.script);
    if (index_.count(key)) {
      throw ParseError("duplicate registry entry " + info.tag.code_script());
    }
    index_.emplace(key, entries_.size());
    entries_.push_back(std::move(info));
  }

  const std::vector<LanguageInfo>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  const LanguageInfo* find(std::string_view code, std::string_view script) const {
    const auto it = index_.find(std::make_pair(std::string(code), std::string(script)));
    return it == index_.end() ? nullptr : &entries_[it->second];
  }

  // First entry written in `script`, if any.
  const LanguageInfo* first_with_script(std::string_view script) const {
    for (const auto& e : entries_) {
      if (e.tag.script == script) return &e;
    }
    return nullptr;
  }

 private:
  std::vector<LanguageInfo> entries_;
  std::map<std::pair<std::string, std::string>, std::size_t> index_;
};

// Parses FAMILY+code_Script. Unknown (code, script) pairs parse with
// registered == false; a registered pair under the wrong family is an error.
inline LanguageTag parse_tag(std::string_view text,
                             const Registry& registry = Registry::bundled()) {
  const auto plus = text.find('+');
  if (plus == std::string_view::npos) {
    throw ParseError("tag '" + std::string(text) + "': missing '+' between family and code");
  }
  const std::string_view fam_part = text.substr(0, plus);
  const std::string_view rest = text.substr(plus + 1);
  const auto fam = family_from_name(fam_part);
  if (!fam) {
    throw ParseError("tag '" + std::string(text) + "': unknown family '" +
                     std::string(fam_part) + "'");
  }
  const auto us = rest.rfind('_');
  if (us == std::string_view::npos) {
    throw ParseError("tag '" + std::string(text) + "': missing '_' between code and script in '" +
                     std::string(rest) + "'");
  }
  const std::string_view code = rest.substr(0, us);
  const std::string_view script = rest.substr(us + 1);
  if (!valid_code(code)) {
    throw ParseError("tag '" + std::string(text) + "': bad language code '" + std::string(code) +
                     "'");
  }
  if (!valid_script_code(script)) {
    throw ParseError("tag '" + std::string(text) + "': bad script code '" + std::string(script) +
                     "'");
  }
  LanguageTag tag{*fam, std::string(code), std::string(script), false};
  if (const auto* info = registry.find(code, script)) {
    if (info->tag.family != tag.family) {
      throw ParseError("tag '" + std::string(text) + "': " + std::string(code) + "_" +
                       std::string(script) + " belongs to family " +
                       std::string(family_name(info->tag.family)));
    }
    tag.registered = true;
  }
  return tag;
}

}  // namespace corpusforge::lang

#endif  // CORPUSFORGE_LANG_REGISTRY_HPP_
