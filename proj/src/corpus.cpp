//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "molopt/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

#include <json.hpp>

#include "molopt/chem/smiles.hpp"
#include "molopt/text.hpp"

namespace molopt {

namespace {

enum class Field {
  kWeight, kTpsa, kClogp, kSas, kQed,
  kHbd, kHba, kRings, kAromaticRings, kRotatable,
  kSimilar, kSynonym, kProperty, kCid, kSmiles,
};

struct TagInfo {
  std::string_view name;
  Field field;
};

constexpr std::array<TagInfo, 15> kTags = {{
    {"WEIGHT", Field::kWeight},
    {"TPSA", Field::kTpsa},
    {"CLOGP", Field::kClogp},
    {"SAS", Field::kSas},
    {"QED", Field::kQed},
    {"NUMHDONORS", Field::kHbd},
    {"NUMHACCEPTORS", Field::kHba},
    {"RINGCOUNT", Field::kRings},
    {"NUMAROMATICRINGS", Field::kAromaticRings},
    {"NUMROTATABLEBONDS", Field::kRotatable},
    {"SIMILAR", Field::kSimilar},
    {"SYNONYM", Field::kSynonym},
    {"PROPERTY", Field::kProperty},
    {"CID", Field::kCid},
    {"START_SMILES", Field::kSmiles},
}};

std::string opening(std::string_view name) { return "[" + std::string(name) + "]"; }

std::string closing(const TagInfo& t) {
  if (t.field == Field::kSmiles) return std::string(tags::kEndSmiles);
  return "[/" + std::string(t.name) + "]";
}

const TagInfo* find_tag(std::string_view name) {
  for (const auto& t : kTags) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::optional<double>& real_slot(ComputedProperties& c, Field f) {
  switch (f) {
    case Field::kWeight: return c.mw;
    case Field::kTpsa: return c.tpsa;
    case Field::kClogp: return c.clogp;
    case Field::kSas: return c.sas;
    default: return c.qed;
  }
}

std::optional<int>& int_slot(ComputedProperties& c, Field f) {
  switch (f) {
    case Field::kHbd: return c.hbd;
    case Field::kHba: return c.hba;
    case Field::kRings: return c.rings;
    case Field::kAromaticRings: return c.aromatic_rings;
    default: return c.rotatable_bonds;
  }
}

bool is_real(Field f) { return f <= Field::kQed; }
bool is_int(Field f) { return f >= Field::kHbd && f <= Field::kRotatable; }

double round2(double v) { return *parse_double(format_fixed2(v)); }

bool starts_value(std::string_view word) {
  if (word.empty()) return false;
  const char c = word[0];
  return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
}

Experimental split_experimental(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos >= text.size()) break;
    std::size_t end = text.find(' ', pos);
    if (end == std::string_view::npos) end = text.size();
    if (starts_value(text.substr(pos, end - pos))) {
      return {std::string(trim(text.substr(0, pos))), std::string(text.substr(pos))};
    }
    pos = end;
  }
  return {std::string(text), ""};
}

std::string join_experimental(const Experimental& e) {
  if (e.value.empty()) return e.name;
  if (e.name.empty()) return e.value;
  return e.name + " " + e.value;
}

std::string similar_text(const Similar& s) { return s.smiles + " " + format_fixed2(s.similarity); }

}  // namespace

std::string wrap_tag(std::string_view name, std::string_view content) {
  std::string out = opening(name);
  out += content;
  out += "[/";
  out += name;
  out += ']';
  return out;
}

ComputedProperties ComputedProperties::from(const DescriptorVector& d) {
  ComputedProperties c;
  c.mw = d.mw;
  c.tpsa = d.tpsa;
  c.clogp = d.clogp;
  c.qed = d.qed;
  c.hbd = d.hbd;
  c.hba = d.hba;
  c.rings = d.rings;
  c.aromatic_rings = d.aromatic_rings;
  c.rotatable_bonds = d.rotatable_bonds;
  return c;
}

MoleculeRecord quantized(const MoleculeRecord& r) {
  MoleculeRecord q = r;
  for (auto* v : {&q.computed.mw, &q.computed.tpsa, &q.computed.clogp, &q.computed.sas, &q.computed.qed}) {
    if (*v) *v = round2(**v);
  }
  for (auto& s : q.similars) s.similarity = round2(s.similarity);
  for (auto& e : q.experimental) e = split_experimental(join_experimental(e));
  return q;
}

MoleculeRecord make_record(std::string_view smiles) {
  const auto g = chem::parse_smiles(smiles);
  MoleculeRecord r;
  r.smiles = std::string(smiles);
  r.computed = ComputedProperties::from(compute_descriptors(g));
  return r;
}

RenderedBlocks render_blocks(const MoleculeRecord& rec, const RenderPolicy& policy) {
  std::vector<std::string> blocks;
  const auto& c = rec.computed;
  auto real = [&](std::string_view tag, const std::optional<double>& v) {
    if (v) blocks.push_back(wrap_tag(tag, format_fixed2(*v)));
  };
  auto integer = [&](std::string_view tag, const std::optional<int>& v) {
    if (v) blocks.push_back(wrap_tag(tag, std::to_string(*v)));
  };
  real("WEIGHT", c.mw);
  real("TPSA", c.tpsa);
  real("CLOGP", c.clogp);
  real("SAS", c.sas);
  real("QED", c.qed);
  integer("NUMHDONORS", c.hbd);
  integer("NUMHACCEPTORS", c.hba);
  integer("RINGCOUNT", c.rings);
  integer("NUMAROMATICRINGS", c.aromatic_rings);
  integer("NUMROTATABLEBONDS", c.rotatable_bonds);
  for (const auto& s : rec.similars) blocks.push_back(wrap_tag("SIMILAR", similar_text(s)));
  for (const auto& s : rec.synonyms) blocks.push_back(wrap_tag("SYNONYM", s));
  for (const auto& e : rec.experimental) blocks.push_back(wrap_tag("PROPERTY", join_experimental(e)));
  if (rec.cid) blocks.push_back(wrap_tag("CID", std::to_string(*rec.cid)));

  Rng rng(policy.rng_seed);
  if (policy.shuffle_properties) rng.shuffle(std::span<std::string>(blocks));
  const bool start_draw = rng.bernoulli(0.5);
  const auto position = policy.position.value_or(start_draw ? MoleculePosition::kStart : MoleculePosition::kInterior);
  std::size_t at = 0;
  if (position == MoleculePosition::kInterior && !blocks.empty()) at = 1 + rng.index(blocks.size());
  std::string smiles_block = std::string(tags::kStartSmiles) + rec.smiles + std::string(tags::kEndSmiles);
  blocks.insert(blocks.begin() + static_cast<std::ptrdiff_t>(at), std::move(smiles_block));
  return {std::move(blocks), at};
}

std::string render(const MoleculeRecord& rec, const RenderPolicy& policy) {
  std::string out;
  for (const auto& b : render_blocks(rec, policy).blocks) out += b;
  return out;
}

MoleculeRecord parse_record(std::string_view text) {
  using Kind = RecordParseError::Kind;
  MoleculeRecord rec;
  bool have_smiles = false;
  bool seen[kTags.size()] = {};
  std::size_t pos = 0;
  auto is_space = [](char ch) { return std::isspace(static_cast<unsigned char>(ch)) != 0; };
  while (true) {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    if (pos >= text.size()) break;
    if (text[pos] != '[') throw RecordParseError(Kind::kStrayText, pos, "text outside of tags");
    const auto close = text.find(']', pos);
    if (close == std::string_view::npos) throw RecordParseError(Kind::kUnbalancedTag, pos, "unterminated tag");
    const auto name = text.substr(pos + 1, close - pos - 1);
    if (!name.empty() && name[0] == '/') {
      throw RecordParseError(Kind::kUnbalancedTag, pos, "closing tag " + std::string(name) + " without opening tag");
    }
    if (name == "END_SMILES") throw RecordParseError(Kind::kUnbalancedTag, pos, "[END_SMILES] without [START_SMILES]");
    const TagInfo* tag = find_tag(name);
    if (!tag) throw RecordParseError(Kind::kUnknownTag, pos, "unknown tag [" + std::string(name) + "]");
    const auto content_begin = close + 1;
    const auto end_tag = closing(*tag);
    const auto end = text.find(end_tag, content_begin);
    if (end == std::string_view::npos) {
      throw RecordParseError(Kind::kUnbalancedTag, pos, "tag [" + std::string(name) + "] is not closed");
    }
    const auto content = text.substr(content_begin, end - content_begin);
    // A nested tag means the outer one was left open.
    for (const auto& t : kTags) {
      const auto nested = content.find(opening(t.name));
      if (nested != std::string_view::npos) {
        throw RecordParseError(Kind::kUnbalancedTag, pos, "tag [" + std::string(name) + "] is not closed before [" + std::string(t.name) + "]");
      }
    }
    const auto index = static_cast<std::size_t>(tag - kTags.data());
    const Field f = tag->field;
    const bool repeatable = f == Field::kSimilar || f == Field::kSynonym || f == Field::kProperty;
    if (!repeatable) {
      if (seen[index]) throw RecordParseError(Kind::kDuplicateField, pos, "duplicate [" + std::string(name) + "]");
      seen[index] = true;
    }
    auto number = [&](std::string_view s) {
      auto v = parse_double(s);
      if (!v || !std::isfinite(*v)) {
        throw RecordParseError(Kind::kMalformedNumber, content_begin, "malformed number '" + std::string(s) + "'");
      }
      return *v;
    };
    auto integer = [&](std::string_view s) {
      auto v = parse_int(s);
      if (!v) throw RecordParseError(Kind::kMalformedNumber, content_begin, "malformed integer '" + std::string(s) + "'");
      return *v;
    };
    if (is_real(f)) {
      real_slot(rec.computed, f) = number(content);
    } else if (is_int(f)) {
      int_slot(rec.computed, f) = static_cast<int>(integer(content));
    } else {
      switch (f) {
        case Field::kSimilar: {
          const auto space = content.rfind(' ');
          if (space == std::string_view::npos) {
            throw RecordParseError(Kind::kMalformedNumber, content_begin, "similar entry lacks a similarity value");
          }
          const double sim = number(content.substr(space + 1));
          if (sim < 0.0 || sim > 1.0) {
            throw RecordParseError(Kind::kMalformedNumber, content_begin + space + 1, "similarity outside [0, 1]");
          }
          rec.similars.push_back({std::string(content.substr(0, space)), sim});
          break;
        }
        case Field::kSynonym: rec.synonyms.emplace_back(content); break;
        case Field::kProperty: rec.experimental.push_back(split_experimental(content)); break;
        case Field::kCid: rec.cid = integer(content); break;
        case Field::kSmiles:
          rec.smiles = std::string(content);
          have_smiles = true;
          break;
        default: break;
      }
    }
    pos = end + end_tag.size();
  }
  if (!have_smiles) throw RecordParseError(Kind::kMissingSmiles, text.size(), "record has no [START_SMILES] block");
  return rec;
}

std::string to_jsonl(const MoleculeRecord& rec) {
  nlohmann::json j;
  if (rec.cid) j["cid"] = *rec.cid;
  j["smiles"] = rec.smiles;
  nlohmann::json c = nlohmann::json::object();
  const auto& p = rec.computed;
  auto put = [&](const char* k, const auto& v) {
    if (v) c[k] = *v;
  };
  put("mw", p.mw);
  put("tpsa", p.tpsa);
  put("clogp", p.clogp);
  put("sas", p.sas);
  put("qed", p.qed);
  put("hbd", p.hbd);
  put("hba", p.hba);
  put("rings", p.rings);
  put("aromatic_rings", p.aromatic_rings);
  put("rotatable_bonds", p.rotatable_bonds);
  j["computed"] = c;
  j["similars"] = nlohmann::json::array();
  for (const auto& s : rec.similars) j["similars"].push_back({s.smiles, s.similarity});
  j["synonyms"] = rec.synonyms;
  j["experimental"] = nlohmann::json::array();
  for (const auto& e : rec.experimental) j["experimental"].push_back({e.name, e.value});
  return j.dump();
}

MoleculeRecord from_jsonl(std::string_view line) {
  const auto j = nlohmann::json::parse(line);
  if (!j.is_object()) throw std::invalid_argument("JSONL record must be an object");
  MoleculeRecord rec;
  if (j.contains("cid") && !j["cid"].is_null()) rec.cid = j["cid"].get<std::int64_t>();
  rec.smiles = j.at("smiles").get<std::string>();
  if (j.contains("computed")) {
    const auto& c = j["computed"];
    auto real = [&](const char* k, std::optional<double>& out) {
      if (c.contains(k)) out = c[k].get<double>();
    };
    auto integer = [&](const char* k, std::optional<int>& out) {
      if (c.contains(k)) out = c[k].get<int>();
    };
    real("mw", rec.computed.mw);
    real("tpsa", rec.computed.tpsa);
    real("clogp", rec.computed.clogp);
    real("sas", rec.computed.sas);
    real("qed", rec.computed.qed);
    integer("hbd", rec.computed.hbd);
    integer("hba", rec.computed.hba);
    integer("rings", rec.computed.rings);
    integer("aromatic_rings", rec.computed.aromatic_rings);
    integer("rotatable_bonds", rec.computed.rotatable_bonds);
  }
  if (j.contains("similars")) {
    for (const auto& s : j["similars"]) {
      const double sim = s.at(1).get<double>();
      if (sim < 0.0 || sim > 1.0) throw std::invalid_argument("similarity outside [0, 1]");
      rec.similars.push_back({s.at(0).get<std::string>(), sim});
    }
  }
  if (j.contains("synonyms")) rec.synonyms = j["synonyms"].get<std::vector<std::string>>();
  if (j.contains("experimental")) {
    for (const auto& e : j["experimental"]) rec.experimental.push_back({e.at(0).get<std::string>(), e.at(1).get<std::string>()});
  }
  return rec;
}

ReferenceTokenizer::ReferenceTokenizer() {
  specials_ = {"<pad>", std::string(tags::kBos), std::string(tags::kEos), "<unk>"};
  for (const auto& t : kTags) {
    specials_.push_back(opening(t.name));
    specials_.push_back(closing(t));
  }
  // Longest first so that encode can take the first prefix match.
  std::stable_sort(specials_.begin() + 4, specials_.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
}

std::vector<std::int32_t> ReferenceTokenizer::encode(std::string_view text) const {
  std::vector<std::int32_t> ids;
  ids.reserve(text.size());
  const auto byte_base = static_cast<std::int32_t>(specials_.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char ch = text[pos];
    bool matched = false;
    if (ch == '[' || ch == '<') {
      for (std::size_t i = 0; i < specials_.size(); ++i) {
        if (text.substr(pos).starts_with(specials_[i])) {
          ids.push_back(static_cast<std::int32_t>(i));
          pos += specials_[i].size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) {
      ids.push_back(byte_base + static_cast<unsigned char>(ch));
      ++pos;
    }
  }
  return ids;
}

std::string ReferenceTokenizer::decode(const std::vector<std::int32_t>& ids) const {
  std::string out;
  const auto byte_base = static_cast<std::int32_t>(specials_.size());
  for (auto id : ids) {
    if (id < 0 || id >= byte_base + 256) throw std::out_of_range("token id " + std::to_string(id) + " outside vocabulary");
    if (id < byte_base) {
      out += specials_[static_cast<std::size_t>(id)];
    } else {
      out += static_cast<char>(id - byte_base);
    }
  }
  return out;
}

std::optional<std::int32_t> ReferenceTokenizer::special_token(std::string_view token) const {
  for (std::size_t i = 0; i < specials_.size(); ++i) {
    if (specials_[i] == token) return static_cast<std::int32_t>(i);
  }
  return std::nullopt;
}

std::size_t ReferenceTokenizer::vocab_size() const { return specials_.size() + 256; }

BlockPacker::BlockPacker(const Tokenizer& tok, std::int32_t separator_id, std::size_t block_size)
    : tok_(tok), separator_(separator_id), block_size_(block_size) {
  if (block_size == 0) throw std::invalid_argument("block size must be positive");
}

std::vector<BlockPacker::Block> BlockPacker::push(std::string_view text) {
  std::vector<Block> out;
  auto append = [&](std::int32_t id) {
    buffer_.push_back(id);
    if (buffer_.size() == block_size_) {
      out.push_back(std::move(buffer_));
      buffer_.clear();
    }
  };
  if (!first_) append(separator_);
  first_ = false;
  for (auto id : tok_.encode(text)) append(id);
  return out;
}

std::vector<BlockPacker::Block> pack_blocks(const std::vector<std::string>& texts, const Tokenizer& tok,
                                            std::int32_t separator_id, std::size_t block_size) {
  BlockPacker packer(tok, separator_id, block_size);
  std::vector<BlockPacker::Block> out;
  for (const auto& t : texts) {
    for (auto& b : packer.push(t)) out.push_back(std::move(b));
  }
  return out;
}

}  // namespace molopt
