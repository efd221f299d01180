#include "ocrqa/text_model.hpp"

#include <algorithm>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <utility>

#include "ocrqa/error.hpp"

namespace ocrqa {

namespace {

bool is_line_break(char32_t ch) {
  switch (ch) {
    case U'\n':
    case U'\r':
    case U'\v':
    case U'\f':
    case U'\u0085':
    case U'\u2028':
    case U'\u2029':
      return true;
    default:
      return false;
  }
}

std::u32string nfc(const std::u32string& text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw Error(std::string("ICU NFC normalizer unavailable: ") + u_errorName(status));
  }
  icu::UnicodeString source = icu::UnicodeString::fromUTF32(
      reinterpret_cast<const UChar32*>(text.data()), static_cast<int32_t>(text.size()));
  if (normalizer->isNormalized(source, status) && U_SUCCESS(status)) {
    return text;
  }
  status = U_ZERO_ERROR;
  icu::UnicodeString composed = normalizer->normalize(source, status);
  if (U_FAILURE(status)) {
    throw InputError(std::string("NFC normalization failed: ") + u_errorName(status));
  }
  std::u32string out;
  out.reserve(static_cast<std::size_t>(composed.length()));
  for (int32_t i = 0; i < composed.length();) {
    UChar32 cp = composed.char32At(i);
    out.push_back(static_cast<char32_t>(cp));
    i += U16_LENGTH(cp);
  }
  return out;
}

// Collapses whitespace runs to one space and trims both ends.
std::u32string collapse_whitespace(std::u32string_view line) {
  std::u32string out;
  out.reserve(line.size());
  bool pending_space = false;
  for (char32_t ch : line) {
    if (is_whitespace(ch)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(U' ');
      pending_space = false;
    }
    out.push_back(ch);
  }
  return out;
}

// Splits on every line-break convention; "\r\n" counts once.
std::vector<std::u32string_view> split_lines(std::u32string_view text) {
  std::vector<std::u32string_view> lines;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (!is_line_break(text[i])) continue;
    lines.push_back(text.substr(start, i - start));
    if (text[i] == U'\r' && i + 1 < text.size() && text[i + 1] == U'\n') ++i;
    start = i + 1;
  }
  if (start < text.size()) lines.push_back(text.substr(start));
  return lines;
}

std::vector<std::u32string> normalized_lines(std::u32string_view decoded) {
  std::vector<std::u32string> out;
  for (std::u32string_view raw : split_lines(decoded)) {
    std::u32string line = collapse_whitespace(raw);
    if (!line.empty()) out.push_back(std::move(line));
  }
  return out;
}

std::u32string decode_nfc(std::string_view raw) {
  std::u32string decoded = utf8_decode(raw);
  if (!decoded.empty() && decoded.front() == U'\uFEFF') decoded.erase(0, 1);
  return nfc(decoded);
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
  });
  return out;
}

std::string_view trim_ascii(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t'; };
  auto b = std::find_if(s.begin(), s.end(), not_space);
  auto e = std::find_if(s.rbegin(), s.rend(), not_space).base();
  return b < e ? std::string_view(&*b, static_cast<std::size_t>(e - b)) : std::string_view{};
}

}  // namespace

std::string_view to_string(CharClass c) {
  switch (c) {
    case CharClass::Alphabet:
      return "alphabet";
    case CharClass::Digit:
      return "digit";
    case CharClass::Special:
      return "special";
  }
  return "?";
}

std::optional<CharClass> parse_char_class(std::string_view name) {
  for (CharClass c : kCharClasses) {
    if (to_string(c) == name) return c;
  }
  return std::nullopt;
}

bool is_whitespace(char32_t ch) { return u_isUWhiteSpace(static_cast<UChar32>(ch)) != 0; }

std::optional<CharClass> classify_char(char32_t ch) {
  const auto cp = static_cast<UChar32>(ch);
  if (u_isUWhiteSpace(cp)) return std::nullopt;
  if (u_isalpha(cp)) return CharClass::Alphabet;
  if (u_isdigit(cp)) return CharClass::Digit;
  return CharClass::Special;
}

std::u32string utf8_decode(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  const auto* s = reinterpret_cast<const uint8_t*>(bytes.data());
  const auto length = static_cast<int32_t>(bytes.size());
  for (int32_t i = 0; i < length;) {
    const int32_t at = i;
    UChar32 cp = 0;
    U8_NEXT(s, i, length, cp);
    if (cp < 0) {
      throw InputError("invalid UTF-8 at byte offset " + std::to_string(at));
    }
    out.push_back(static_cast<char32_t>(cp));
  }
  return out;
}

std::string utf8_encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t ch : text) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t n = 0;
    UBool error = false;
    U8_APPEND(buf, n, U8_MAX_LENGTH, static_cast<UChar32>(ch), error);
    if (error) throw InputError("code point out of range");
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
  }
  return out;
}

// NormalizedText --------------------------------------------------------------

NormalizedText NormalizedText::from_normalized_lines(std::vector<std::u32string> lines) {
  NormalizedText text;
  text.lines_.reserve(lines.size());
  for (auto& chars : lines) {
    Line line;
    line.index = text.lines_.size();
    line.text = utf8_encode(chars);
    line.segments = tokenize_segments(line.text);
    text.char_count_ += chars.size();
    line.chars = std::move(chars);
    text.lines_.push_back(std::move(line));
  }
  return text;
}

std::size_t NormalizedText::segment_count() const noexcept {
  std::size_t n = 0;
  for (const Line& line : lines_) n += line.segments.size();
  return n;
}

std::string NormalizedText::str() const {
  std::string out;
  for (const Line& line : lines_) {
    if (line.index != 0) out.push_back('\n');
    out += line.text;
  }
  return out;
}

NormalizedText normalize(std::string_view raw) {
  return NormalizedText::from_normalized_lines(normalized_lines(decode_nfc(raw)));
}

std::vector<StringSegment> tokenize_segments(std::string_view line) {
  std::vector<StringSegment> segments;
  const std::u32string chars = utf8_decode(line);
  std::u32string current;
  CharClassSet classes;
  auto flush = [&] {
    if (current.empty()) return;
    segments.push_back({utf8_encode(current), classes});
    current.clear();
    classes = {};
  };
  for (char32_t ch : chars) {
    auto cls = classify_char(ch);
    if (!cls) {
      flush();
      continue;
    }
    classes.insert(*cls);
    current.push_back(ch);
  }
  flush();
  return segments;
}

NormalizedText filter_by_class(const NormalizedText& text, CharClass c) {
  std::vector<std::u32string> kept;
  for (const Line& line : text.lines()) {
    std::u32string filtered;
    for (char32_t ch : line.chars) {
      if (classify_char(ch) == c) filtered.push_back(ch);
    }
    if (!filtered.empty()) kept.push_back(std::move(filtered));
  }
  return NormalizedText::from_normalized_lines(std::move(kept));
}

// Symbols ---------------------------------------------------------------------

SymbolTable::SymbolTable(std::vector<std::string> distinct_sorted_texts)
    : texts_(std::move(distinct_sorted_texts)) {}

std::optional<Symbol> SymbolTable::find(std::string_view text) const {
  auto it = std::lower_bound(texts_.begin(), texts_.end(), text);
  if (it == texts_.end() || *it != text) return std::nullopt;
  return static_cast<Symbol>(it - texts_.begin());
}

SymbolizedPair build_symbols(const NormalizedText& gt, const NormalizedText& ocr) {
  std::vector<std::string> texts;
  for (const NormalizedText* side : {&gt, &ocr}) {
    for (const Line& line : side->lines()) {
      for (const StringSegment& seg : line.segments) texts.push_back(seg.text);
    }
  }
  std::sort(texts.begin(), texts.end());
  texts.erase(std::unique(texts.begin(), texts.end()), texts.end());

  SymbolizedPair pair{SymbolTable(std::move(texts)), {}, {}};
  auto convert = [&pair](const NormalizedText& side) {
    std::vector<SymbolLine> lines;
    lines.reserve(side.line_count());
    for (const Line& line : side.lines()) {
      SymbolLine symbols;
      symbols.reserve(line.segments.size());
      for (const StringSegment& seg : line.segments) symbols.push_back(*pair.table.find(seg.text));
      lines.push_back(std::move(symbols));
    }
    return lines;
  };
  pair.gt = convert(gt);
  pair.ocr = convert(ocr);
  return pair;
}

SymbolLine flatten(const std::vector<SymbolLine>& lines) {
  SymbolLine flat;
  for (const SymbolLine& line : lines) flat.insert(flat.end(), line.begin(), line.end());
  return flat;
}

// Ground truth ----------------------------------------------------------------

std::string_view to_string(SectionKind k) {
  switch (k) {
    case SectionKind::Store:
      return "store";
    case SectionKind::Items:
      return "items";
    case SectionKind::Transaction:
      return "transaction";
    case SectionKind::Misc:
      return "misc";
    case SectionKind::Other:
      return "other";
  }
  return "?";
}

std::optional<SectionKind> parse_section_kind(std::string_view name) {
  const std::string lowered = lower_ascii(name);
  for (SectionKind k : kSectionKinds) {
    if (to_string(k) == lowered) return k;
  }
  return std::nullopt;
}

GroundTruthDoc::GroundTruthDoc(std::vector<Section> sections) : sections_(std::move(sections)) {
  std::vector<std::u32string> all;
  for (const Section& section : sections_) {
    for (const Line& line : section.body.lines()) {
      all.push_back(line.chars);
      line_sections_.push_back(section.kind);
    }
  }
  full_ = NormalizedText::from_normalized_lines(std::move(all));
}

GroundTruthDoc parse_ground_truth(std::string_view bytes) {
  static constexpr std::string_view kHeader = "#section:";

  const std::u32string decoded = decode_nfc(bytes);
  std::vector<Section> sections;
  SectionKind current = SectionKind::Other;
  bool explicit_section = false;
  std::vector<std::u32string> body;

  auto close = [&] {
    // The implicit leading section only exists when it has content.
    if (explicit_section || !body.empty()) {
      sections.push_back({current, NormalizedText::from_normalized_lines(std::move(body))});
    }
    body.clear();
  };

  std::size_t line_no = 0;
  for (std::u32string_view raw : split_lines(decoded)) {
    ++line_no;
    const std::string utf8 = utf8_encode(raw);
    const std::string_view trimmed = trim_ascii(utf8);
    if (trimmed.size() >= kHeader.size() &&
        lower_ascii(trimmed.substr(0, kHeader.size())) == kHeader) {
      const std::string_view name = trim_ascii(trimmed.substr(kHeader.size()));
      auto kind = parse_section_kind(name);
      if (!kind) {
        throw ParseError("unknown section name '" + std::string(name) + "'", line_no);
      }
      close();
      current = *kind;
      explicit_section = true;
      continue;
    }
    std::u32string line = collapse_whitespace(raw);
    if (!line.empty()) body.push_back(std::move(line));
  }
  close();
  return GroundTruthDoc(std::move(sections));
}

}  // namespace ocrqa
