//
// Project molopt - Copyright 2026 The molopt Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "molopt/descriptors.hpp"
#include "molopt/rng.hpp"

namespace molopt {

namespace tags {
inline constexpr std::string_view kStartSmiles = "[START_SMILES]";
inline constexpr std::string_view kEndSmiles = "[END_SMILES]";
inline constexpr std::string_view kBos = "<bos>";
inline constexpr std::string_view kEos = "</s>";
}  // namespace tags

/// "[NAME]content[/NAME]"
std::string wrap_tag(std::string_view name, std::string_view content);

/// Computed properties carried by a record. Every field is optional so that
/// abbreviated records survive a round trip.
struct ComputedProperties {
  std::optional<double> mw, tpsa, clogp, sas, qed;
  std::optional<int> hbd, hba, rings, aromatic_rings, rotatable_bonds;

  static ComputedProperties from(const DescriptorVector& d);
  friend bool operator==(const ComputedProperties&, const ComputedProperties&) = default;
};

struct Similar {
  std::string smiles;
  double similarity = 0.0;
  friend bool operator==(const Similar&, const Similar&) = default;
};

/// An experimental property. Rendered as "name value"; on parse the value
/// starts at the first whitespace-separated word beginning with a digit,
/// sign or decimal point. With no such word the whole text is the name.
struct Experimental {
  std::string name;
  std::string value;
  friend bool operator==(const Experimental&, const Experimental&) = default;
};

struct MoleculeRecord {
  std::optional<std::int64_t> cid;
  std::string smiles;
  ComputedProperties computed;
  std::vector<Similar> similars;
  std::vector<std::string> synonyms;
  std::vector<Experimental> experimental;

  friend bool operator==(const MoleculeRecord&, const MoleculeRecord&) = default;
};

/// Record with every number rounded the way render prints it. parse(render(r))
/// equals quantized(r) up to field order.
MoleculeRecord quantized(const MoleculeRecord& r);

/// Builds a record for a SMILES string with all descriptors computed.
MoleculeRecord make_record(std::string_view smiles);

enum class MoleculePosition { kStart, kInterior };

struct RenderPolicy {
  std::uint64_t rng_seed = 0;
  /// Forced position; sampled 50/50 when absent.
  std::optional<MoleculePosition> position;
  bool shuffle_properties = true;
};

/// Text blocks of a render, SMILES block included, in output order.
struct RenderedBlocks {
  std::vector<std::string> blocks;
  std::size_t smiles_index = 0;
};

RenderedBlocks render_blocks(const MoleculeRecord& rec, const RenderPolicy& policy);
std::string render(const MoleculeRecord& rec, const RenderPolicy& policy);

class RecordParseError : public std::runtime_error {
 public:
  enum class Kind { kUnbalancedTag, kUnknownTag, kMalformedNumber, kDuplicateField, kMissingSmiles, kStrayText };
  RecordParseError(Kind kind, std::size_t offset, const std::string& message)
      : std::runtime_error(message + " at offset " + std::to_string(offset)), kind_(kind), offset_(offset) { }
  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// Parses tagged text (whitespace between blocks is ignored).
MoleculeRecord parse_record(std::string_view text);

/// One JSON object per line.
std::string to_jsonl(const MoleculeRecord& rec);
MoleculeRecord from_jsonl(std::string_view line);

class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<std::int32_t> encode(std::string_view text) const = 0;
  virtual std::string decode(const std::vector<std::int32_t>& ids) const = 0;
  virtual std::optional<std::int32_t> special_token(std::string_view token) const = 0;
  virtual std::size_t vocab_size() const = 0;
};

/// Every tag and marker is one token; any other text is encoded byte by
/// byte. Lossless.
class ReferenceTokenizer final : public Tokenizer {
 public:
  ReferenceTokenizer();
  std::vector<std::int32_t> encode(std::string_view text) const override;
  std::string decode(const std::vector<std::int32_t>& ids) const override;
  std::optional<std::int32_t> special_token(std::string_view token) const override;
  std::size_t vocab_size() const override;

  const std::vector<std::string>& specials() const noexcept { return specials_; }

 private:
  std::vector<std::string> specials_;
};

/// Concatenates documents with a separator between consecutive ones and
/// emits fixed-size blocks. The trailing partial block is never emitted.
class BlockPacker {
 public:
  using Block = std::vector<std::int32_t>;

  BlockPacker(const Tokenizer& tok, std::int32_t separator_id, std::size_t block_size = 2048);

  /// Adds a document and returns the blocks completed by it.
  std::vector<Block> push(std::string_view text);
  /// Tokens held back in the current partial block.
  std::size_t pending() const noexcept { return buffer_.size(); }

 private:
  const Tokenizer& tok_;
  std::int32_t separator_;
  std::size_t block_size_;
  bool first_ = true;
  Block buffer_;
};

std::vector<BlockPacker::Block> pack_blocks(const std::vector<std::string>& texts, const Tokenizer& tok,
                                            std::int32_t separator_id, std::size_t block_size = 2048);

}  // namespace molopt
