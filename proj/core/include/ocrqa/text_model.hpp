#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ocrqa {

// Character classes. Whitespace belongs to none of them.
enum class CharClass : std::uint8_t { Alphabet, Digit, Special };

inline constexpr std::array<CharClass, 3> kCharClasses = {CharClass::Alphabet, CharClass::Digit,
                                                          CharClass::Special};

std::string_view to_string(CharClass c);
std::optional<CharClass> parse_char_class(std::string_view name);

/// Small bitset over CharClass.
class CharClassSet {
 public:
  constexpr CharClassSet() = default;

  constexpr void insert(CharClass c) { bits_ |= mask(c); }
  constexpr bool contains(CharClass c) const { return (bits_ & mask(c)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const {
    return static_cast<std::size_t>((bits_ & 1) + ((bits_ >> 1) & 1) + ((bits_ >> 2) & 1));
  }

  friend constexpr bool operator==(CharClassSet, CharClassSet) = default;

 private:
  static constexpr std::uint8_t mask(CharClass c) {
    return static_cast<std::uint8_t>(1u << static_cast<unsigned>(c));
  }
  std::uint8_t bits_ = 0;
};

bool is_whitespace(char32_t ch);

/// Letters -> Alphabet, decimal digits -> Digit, whitespace -> nullopt, anything else -> Special.
std::optional<CharClass> classify_char(char32_t ch);

struct StringSegment {
  std::string text;  // UTF-8, never empty, never contains whitespace
  CharClassSet classes_present;

  friend bool operator==(const StringSegment&, const StringSegment&) = default;
};

struct Line {
  std::size_t index = 0;
  std::string text;      // UTF-8
  std::u32string chars;  // same content, one element per code point
  std::vector<StringSegment> segments;
};

/// Text after normalization: NFC, one entry per non-blank line, no leading or
/// trailing whitespace, internal whitespace runs collapsed to a single space.
class NormalizedText {
 public:
  NormalizedText() = default;

  /// Builds from code-point lines that already satisfy the invariants.
  static NormalizedText from_normalized_lines(std::vector<std::u32string> lines);

  const std::vector<Line>& lines() const noexcept { return lines_; }
  std::size_t line_count() const noexcept { return lines_.size(); }
  /// Code points over all lines; spaces count, line breaks do not.
  std::size_t char_count() const noexcept { return char_count_; }
  std::size_t segment_count() const noexcept;
  bool empty() const noexcept { return lines_.empty(); }

  /// Lines joined by '\n'.
  std::string str() const;

  friend bool operator==(const NormalizedText& a, const NormalizedText& b) {
    return a.str() == b.str();
  }

 private:
  std::vector<Line> lines_;
  std::size_t char_count_ = 0;
};

/// Throws InputError when `raw` is not valid UTF-8.
NormalizedText normalize(std::string_view raw);

/// Maximal whitespace-free runs of `line`, left to right.
std::vector<StringSegment> tokenize_segments(std::string_view line);

/// Keeps only characters of class `c`; lines left empty are dropped.
NormalizedText filter_by_class(const NormalizedText& text, CharClass c);

// Segment symbols ----------------------------------------------------------

using Symbol = std::uint32_t;
using SymbolLine = std::vector<Symbol>;

/// Bidirectional map between symbol ids and segment texts. Ids follow the
/// byte-lexicographic order of the distinct texts, so they depend on content only.
class SymbolTable {
 public:
  SymbolTable() = default;
  explicit SymbolTable(std::vector<std::string> distinct_sorted_texts);

  std::optional<Symbol> find(std::string_view text) const;
  const std::string& text(Symbol id) const { return texts_.at(id); }
  std::size_t size() const noexcept { return texts_.size(); }

 private:
  std::vector<std::string> texts_;
};

struct SymbolizedPair {
  SymbolTable table;
  std::vector<SymbolLine> gt;
  std::vector<SymbolLine> ocr;
};

/// One symbol per segment; equal segment texts share a symbol across both sides.
SymbolizedPair build_symbols(const NormalizedText& gt, const NormalizedText& ocr);

/// Row-major concatenation of symbol lines (left to right, top to bottom).
SymbolLine flatten(const std::vector<SymbolLine>& lines);

// Ground-truth documents ---------------------------------------------------

enum class SectionKind : std::uint8_t { Store, Items, Transaction, Misc, Other };

inline constexpr std::array<SectionKind, 5> kSectionKinds = {
    SectionKind::Store, SectionKind::Items, SectionKind::Transaction, SectionKind::Misc,
    SectionKind::Other};

std::string_view to_string(SectionKind k);
std::optional<SectionKind> parse_section_kind(std::string_view name);

struct Section {
  SectionKind kind;
  NormalizedText body;
};

class GroundTruthDoc {
 public:
  GroundTruthDoc() = default;
  explicit GroundTruthDoc(std::vector<Section> sections);

  const std::vector<Section>& sections() const noexcept { return sections_; }
  bool empty() const noexcept { return full_.empty(); }

  /// All section bodies concatenated in file order.
  const NormalizedText& full_text() const noexcept { return full_; }
  /// Section of each line of full_text().
  const std::vector<SectionKind>& line_sections() const noexcept { return line_sections_; }

 private:
  std::vector<Section> sections_;
  NormalizedText full_;
  std::vector<SectionKind> line_sections_;
};

/// Parses the `#section: <name>` ground-truth format. Lines before the first
/// header form an implicit Other section.
GroundTruthDoc parse_ground_truth(std::string_view bytes);

// UTF helpers shared by the rest of the library.
std::u32string utf8_decode(std::string_view bytes);  // throws InputError
std::string utf8_encode(std::u32string_view text);

}  // namespace ocrqa
