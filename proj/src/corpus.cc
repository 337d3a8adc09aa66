// corpus.cc

// Copyright 2026 The seqcritic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "seqcritic/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "json.hpp"
#include "seqcritic/errors.h"

namespace seqcritic {

namespace {

const char* const kReservedWords[] = {"<bos>", "<eos>", "<unk>"};

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Vocabulary::Vocabulary() {
  for (const char* w : kReservedWords) Add(w);
}

Token Vocabulary::Add(std::string_view word) {
  auto it = ids_.find(std::string(word));
  if (it != ids_.end()) return it->second;
  Token id = static_cast<Token>(words_.size());
  words_.emplace_back(word);
  ids_.emplace(words_.back(), id);
  return id;
}

Token Vocabulary::Lookup(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  return it == ids_.end() ? kUnk : it->second;
}

bool Vocabulary::Contains(std::string_view word) const {
  return ids_.count(std::string(word)) > 0;
}

const std::string& Vocabulary::Word(Token id) const {
  if (id < 0 || id >= size()) throw UsageError("Vocabulary::Word: id out of range");
  return words_[id];
}

std::vector<Token> Vocabulary::Encode(std::span<const std::string> words) const {
  std::vector<Token> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(Lookup(w));
  return out;
}

std::vector<std::string> Vocabulary::Decode(std::span<const Token> tokens) const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (Token t : tokens) out.push_back(Word(t));
  return out;
}

std::string Vocabulary::DecodeText(std::span<const Token> tokens) const {
  std::string out;
  for (Token t : tokens) {
    if (t == kEos) break;
    if (!out.empty()) out += ' ';
    out += Word(t);
  }
  return out;
}

void Vocabulary::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (const auto& w : words_) out << w << '\n';
}

Vocabulary Vocabulary::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  Vocabulary vocab;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    if (line_no < 3) {
      if (line != kReservedWords[line_no])
        throw SchemaError("vocabulary " + path.string() +
                              ": reserved word expected on line " +
                              std::to_string(line_no + 1),
                          kReservedWords[line_no]);
    } else {
      vocab.Add(line);
    }
    ++line_no;
  }
  return vocab;
}

const char* SplitName(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

Split ParseSplit(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw ConfigError("unknown split '" + std::string(name) + "'");
}

const std::vector<std::size_t>& SplitSpec::Get(Split split) const {
  switch (split) {
    case Split::kTrain: return train;
    case Split::kVal: return val;
    case Split::kTest: return test;
  }
  return train;
}

SplitSpec Dataset::Splits() const {
  SplitSpec spec;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    switch (examples[i].split) {
      case Split::kTrain: spec.train.push_back(i); break;
      case Split::kVal: spec.val.push_back(i); break;
      case Split::kTest: spec.test.push_back(i); break;
    }
  }
  return spec;
}

std::vector<const Example*> Dataset::Select(Split split) const {
  std::vector<const Example*> out;
  for (const auto& ex : examples)
    if (ex.split == split) out.push_back(&ex);
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic captions.

namespace {

SyntheticLexicon MakeLexicon() {
  SyntheticLexicon lex;
  lex.function_words = {"a", "there", "is", "on", "the", "that", "and", "has", "it"};
  lex.slot_names = {"object", "color", "place", "action", "size"};
  lex.surface_forms = {
      {{"dog", "puppy"}, {"cat", "kitten"}, {"horse", "pony"}, {"bird"},
       {"man", "guy"}, {"woman", "lady"}},
      {{"red"}, {"blue"}, {"green"}, {"black", "dark"}, {"white"},
       {"brown", "tan"}},
      {{"grass", "lawn"}, {"road", "street"}, {"beach", "shore"}, {"table"},
       {"bed"}, {"field"}},
      {{"sitting"}, {"standing"}, {"running", "racing"},
       {"sleeping", "resting"}, {"eating"}},
      {{"small", "little"}, {"large", "big"}, {"tiny"}},
  };
  return lex;
}

// `[...]` groups are dropped unless every slot inside is active.
const char* const kTemplates[] = {
    "a [{size}] {color} {object} [{action}] on the {place}",
    "there is a [{size}] {color} {object} [{action}] on the {place}",
    "a [{size}] {object} that is {color} [and {action}] on the {place}",
    "the {place} has a [{size}] {color} {object} [{action}] on it",
    "a [{size}] {color} {object} is [{action}] on the {place}",
};

int SlotIndex(const SyntheticLexicon& lex, std::string_view name) {
  for (std::size_t i = 0; i < lex.slot_names.size(); ++i)
    if (lex.slot_names[i] == name) return static_cast<int>(i);
  throw std::logic_error("bad template slot");
}

std::vector<std::string> Realize(const SyntheticLexicon& lex,
                                 std::string_view tmpl,
                                 const std::vector<int>& values,
                                 std::mt19937_64& rng) {
  std::vector<std::string> out;
  std::vector<std::string> group;
  bool in_group = false;
  bool group_ok = true;
  std::istringstream words{std::string(tmpl)};
  std::string raw;
  while (words >> raw) {
    std::string w = raw;
    bool open = false, close = false;
    if (!w.empty() && w.front() == '[') { open = true; w.erase(0, 1); }
    if (!w.empty() && w.back() == ']') { close = true; w.pop_back(); }
    if (open) { in_group = true; group_ok = true; group.clear(); }
    std::string token;
    bool ok = true;
    if (w.size() > 2 && w.front() == '{') {
      int slot = SlotIndex(lex, w.substr(1, w.size() - 2));
      if (slot >= static_cast<int>(values.size())) {
        ok = false;
      } else {
        const auto& forms = lex.surface_forms[slot][values[slot]];
        std::size_t pick = 0;
        if (forms.size() > 1) {
          std::uniform_real_distribution<double> u(0.0, 1.0);
          if (u(rng) >= 0.7) {
            std::uniform_int_distribution<std::size_t> alt(1, forms.size() - 1);
            pick = alt(rng);
          }
        }
        token = forms[pick];
      }
    } else {
      token = w;
    }
    if (in_group) {
      group_ok = group_ok && ok;
      if (ok) group.push_back(token);
      if (close) {
        if (group_ok) out.insert(out.end(), group.begin(), group.end());
        in_group = false;
      }
    } else if (ok) {
      out.push_back(token);
    }
  }
  return out;
}

}  // namespace

const SyntheticLexicon& GetSyntheticLexicon() {
  static const SyntheticLexicon lex = MakeLexicon();
  return lex;
}

std::vector<int> DecodeSyntheticAttributes(const Example& example,
                                           int num_attributes) {
  const auto& lex = GetSyntheticLexicon();
  std::vector<int> values;
  std::size_t offset = 0;
  for (int s = 0; s < num_attributes; ++s) {
    const std::size_t n = lex.surface_forms[s].size();
    int best = 0;
    for (std::size_t v = 0; v < n; ++v)
      if (example.context[offset + v] > example.context[offset + best])
        best = static_cast<int>(v);
    values.push_back(best);
    offset += n;
  }
  return values;
}

namespace {

void AssignSplits(std::vector<Example>& examples, double val_fraction,
                  double test_fraction, std::uint64_t seed) {
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(MixSeed(seed, 0x5eed));
  std::shuffle(order.begin(), order.end(), rng);
  const auto n = static_cast<double>(examples.size());
  const auto n_test = static_cast<std::size_t>(test_fraction * n);
  const auto n_val = static_cast<std::size_t>(val_fraction * n);
  for (std::size_t i = 0; i < order.size(); ++i) {
    Split s = i < n_test ? Split::kTest
                         : (i < n_test + n_val ? Split::kVal : Split::kTrain);
    examples[order[i]].split = s;
  }
}

}  // namespace

Dataset GenerateSynthetic(const SyntheticConfig& config) {
  const auto& lex = GetSyntheticLexicon();
  if (config.num_attributes < 3 ||
      config.num_attributes > static_cast<int>(lex.slot_names.size()))
    throw ConfigError("synthetic: num_attributes must be in [3, " +
                      std::to_string(lex.slot_names.size()) + "]");
  if (config.num_examples < 1 || config.refs_per_example < 1)
    throw ConfigError("synthetic: need at least one example and one reference");
  std::size_t onehot = 0;
  for (int s = 0; s < config.num_attributes; ++s) onehot += lex.surface_forms[s].size();
  if (static_cast<int>(onehot) > config.context_dim)
    throw ConfigError("synthetic: context_dim " + std::to_string(config.context_dim) +
                      " too small for " + std::to_string(onehot) + " attribute values");

  Dataset ds;
  ds.context_dim = config.context_dim;
  for (const auto& w : lex.function_words) ds.vocab.Add(w);
  for (int s = 0; s < config.num_attributes; ++s)
    for (const auto& forms : lex.surface_forms[s])
      for (const auto& f : forms) ds.vocab.Add(f);

  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<int> pick_template(0, std::size(kTemplates) - 1);
  char id[32];
  for (int i = 0; i < config.num_examples; ++i) {
    Example ex;
    std::snprintf(id, sizeof(id), "syn-%06d", i);
    ex.id = id;
    ex.context.assign(config.context_dim, 0.0);
    std::vector<int> values;
    std::size_t offset = 0;
    for (int s = 0; s < config.num_attributes; ++s) {
      const int n = static_cast<int>(lex.surface_forms[s].size());
      std::uniform_int_distribution<int> pick(0, n - 1);
      values.push_back(pick(rng));
      ex.context[offset + values.back()] = 1.0;
      offset += n;
    }
    for (int r = 0; r < config.refs_per_example; ++r) {
      auto words = Realize(lex, kTemplates[pick_template(rng)], values, rng);
      ex.references.push_back(ds.vocab.Encode(words));
    }
    ds.examples.push_back(std::move(ex));
  }
  AssignSplits(ds.examples, config.val_fraction, config.test_fraction, config.seed);
  return ds;
}

// ---------------------------------------------------------------------------
// COCO captions.

std::vector<std::string> TokenizeCaption(std::string_view caption, int max_len) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char ch : caption) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      flush();
    } else {
      cur += static_cast<char>(std::tolower(c));
    }
  }
  flush();
  if (max_len > 0 && static_cast<int>(out.size()) > max_len) out.resize(max_len);
  return out;
}

namespace {

using Json = nlohmann::json;

std::string IdString(const Json& id) {
  if (id.is_string()) return id.get<std::string>();
  if (id.is_number_integer()) return std::to_string(id.get<long long>());
  return id.dump();
}

const Json& Require(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw SchemaError("missing field '" + where + "." + key + "'", where + "." + key);
  return obj.at(key);
}

std::vector<double> PseudoFeature(const std::string& id, int dim) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : id) h = (h ^ c) * 1099511628211ULL;
  std::mt19937_64 rng(h);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(dim);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

Dataset ParseCocoJson(std::string_view text, const CocoLoadOptions& options) {
  Json root;
  try {
    root = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    // nlohmann counts bytes read; report the 0-based offending position.
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError("malformed JSON at byte " + std::to_string(offset) + ": " + e.what(),
                     offset);
  }
  const Json& images = Require(root, "images", "$");
  const Json& annotations = Require(root, "annotations", "$");
  if (!images.is_array()) throw SchemaError("field '$.images' is not an array", "$.images");
  if (!annotations.is_array())
    throw SchemaError("field '$.annotations' is not an array", "$.annotations");

  struct Image {
    std::string id;
    std::optional<Split> split;
    std::vector<double> feature;
    std::vector<std::vector<std::string>> captions;
  };
  std::vector<Image> imgs;
  std::map<std::string, std::size_t> index;
  int context_dim = -1;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string where = "$.images[" + std::to_string(i) + "]";
    Image img;
    img.id = IdString(Require(images[i], "id", where));
    if (images[i].contains("split")) {
      const Json& split = images[i]["split"];
      if (!split.is_string()) throw SchemaError(where + ".split is not a string", where + ".split");
      try {
        img.split = ParseSplit(split.get<std::string>());
      } catch (const ConfigError& e) {
        throw SchemaError(where + ".split: " + e.what(), where + ".split");
      }
    }
    if (images[i].contains("feature")) {
      const Json& feature = images[i]["feature"];
      if (!feature.is_array())
        throw SchemaError(where + ".feature is not an array", where + ".feature");
      for (const auto& x : feature)
        if (!x.is_number())
          throw SchemaError(where + ".feature holds a non-number", where + ".feature");
      img.feature = feature.get<std::vector<double>>();
      if (context_dim >= 0 && static_cast<int>(img.feature.size()) != context_dim)
        throw SchemaError(where + ".feature has inconsistent length", where + ".feature");
      context_dim = static_cast<int>(img.feature.size());
    }
    if (!index.emplace(img.id, imgs.size()).second)
      throw SchemaError(where + ".id duplicates image " + img.id, where + ".id");
    imgs.push_back(std::move(img));
  }
  if (context_dim < 0) context_dim = options.context_dim;

  std::map<std::string, int> counts;
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const std::string where = "$.annotations[" + std::to_string(i) + "]";
    std::string image_id = IdString(Require(annotations[i], "image_id", where));
    const Json& cap = Require(annotations[i], "caption", where);
    if (!cap.is_string()) throw SchemaError(where + ".caption is not a string", where + ".caption");
    auto it = index.find(image_id);
    if (it == index.end())
      throw SchemaError(where + ".image_id refers to unknown image " + image_id,
                        where + ".image_id");
    auto words = TokenizeCaption(cap.get<std::string>(), options.max_len);
    for (const auto& w : words) ++counts[w];
    imgs[it->second].captions.push_back(std::move(words));
  }

  // Kept words ordered by descending count, then alphabetically.
  std::vector<std::pair<std::string, int>> kept;
  for (const auto& [w, c] : counts)
    if (c >= options.min_word_count) kept.emplace_back(w, c);
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  Dataset ds;
  ds.context_dim = context_dim;
  ds.max_len = options.max_len;
  for (const auto& [w, c] : kept) ds.vocab.Add(w);
  bool any_explicit_split = false;
  for (auto& img : imgs) {
    if (img.captions.empty()) continue;
    Example ex;
    ex.id = img.id;
    ex.context = img.feature.empty() ? PseudoFeature(img.id, context_dim) : img.feature;
    for (const auto& cap : img.captions) ex.references.push_back(ds.vocab.Encode(cap));
    if (img.split) {
      ex.split = *img.split;
      any_explicit_split = true;
    }
    ds.examples.push_back(std::move(ex));
  }
  if (!any_explicit_split)
    AssignSplits(ds.examples, options.val_fraction, options.test_fraction, 0);
  return ds;
}

Dataset LoadCocoJson(const std::filesystem::path& path,
                     const CocoLoadOptions& options) {
  return ParseCocoJson(ReadFile(path), options);
}

// ---------------------------------------------------------------------------
// JSON-lines.

void SaveJsonLines(const Dataset& dataset, const std::filesystem::path& path,
                   const std::filesystem::path& vocab_path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (const auto& ex : dataset.examples) {
    nlohmann::ordered_json j;
    j["id"] = ex.id;
    j["split"] = SplitName(ex.split);
    j["context"] = ex.context;
    auto refs = nlohmann::ordered_json::array();
    for (const auto& r : ex.references) refs.push_back(dataset.vocab.Decode(r));
    j["references"] = std::move(refs);
    out << j.dump() << '\n';
  }
  dataset.vocab.Save(vocab_path);
}

Dataset LoadJsonLines(const std::filesystem::path& path,
                      const std::filesystem::path& vocab_path) {
  Dataset ds;
  ds.vocab = Vocabulary::Load(vocab_path);
  std::string text = ReadFile(path);
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + pos, end - pos);
    ++line_no;
    if (!line.empty()) {
      Json j;
      try {
        j = Json::parse(line.begin(), line.end());
      } catch (const Json::parse_error& e) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": malformed JSON at byte " +
                             std::to_string(pos + e.byte - 1),
                         pos + e.byte - 1);
      }
      const std::string where = "line " + std::to_string(line_no);
      Example ex;
      ex.id = IdString(Require(j, "id", where));
      ex.split = ParseSplit(Require(j, "split", where).get<std::string>());
      ex.context = Require(j, "context", where).get<std::vector<double>>();
      for (const auto& r : Require(j, "references", where)) {
        std::vector<Token> toks;
        for (const auto& w : r) {
          const std::string word = w.get<std::string>();
          if (!ds.vocab.Contains(word))
            throw SchemaError(where + ": word '" + word + "' not in vocabulary",
                              "references");
          toks.push_back(ds.vocab.Lookup(word));
        }
        ex.references.push_back(std::move(toks));
      }
      if (ds.context_dim == 0) ds.context_dim = static_cast<int>(ex.context.size());
      if (static_cast<int>(ex.context.size()) != ds.context_dim)
        throw SchemaError(where + ": context length differs from earlier lines", "context");
      ds.examples.push_back(std::move(ex));
    }
    pos = end + 1;
  }
  return ds;
}

CorpusIdf FitRewardIdf(const Dataset& dataset, Split split) {
  std::vector<std::vector<TokenSequence>> sets;
  for (const auto& ex : dataset.examples) {
    if (ex.split != split) continue;
    std::vector<TokenSequence> refs;
    for (const auto& r : ex.references) refs.emplace_back(r, false);
    auto with_eos = WithEosReferences(ex.references);
    refs.insert(refs.end(), with_eos.begin(), with_eos.end());
    sets.push_back(std::move(refs));
  }
  if (sets.empty())
    throw ConfigError(std::string("no examples in split '") + SplitName(split) +
                      "' to fit idf");
  return FitIdf(sets);
}

}  // namespace seqcritic
