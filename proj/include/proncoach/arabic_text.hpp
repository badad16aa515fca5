// Copyright 2026 The proncoach Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Arabic text handling: normalization, grapheme segmentation with attached
// diacritics, and a reversible Buckwalter romanization.
//
// A grapheme is one base letter together with its diacritics, stored with
// shadda first and the vowel/tanwin/sukun mark second. Spaces are kept as
// graphemes with no diacritics so that display text survives segmentation.

#ifndef PRONCOACH_ARABIC_TEXT_HPP_
#define PRONCOACH_ARABIC_TEXT_HPP_

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proncoach/errors.hpp"

namespace proncoach {

namespace cp {
inline constexpr char32_t kSpace = 0x0020;
inline constexpr char32_t kTatweel = 0x0640;
inline constexpr char32_t kFathatan = 0x064B;
inline constexpr char32_t kDammatan = 0x064C;
inline constexpr char32_t kKasratan = 0x064D;
inline constexpr char32_t kFatha = 0x064E;
inline constexpr char32_t kDamma = 0x064F;
inline constexpr char32_t kKasra = 0x0650;
inline constexpr char32_t kShadda = 0x0651;
inline constexpr char32_t kSukun = 0x0652;
inline constexpr char32_t kAlefWasla = 0x0671;
}  // namespace cp

struct Grapheme {
  char32_t base = cp::kSpace;
  std::u32string diacritics;  // canonical: shadda, then vowel mark

  bool is_space() const { return base == cp::kSpace; }
  bool has_shadda() const {
    return !diacritics.empty() && diacritics.front() == cp::kShadda;
  }
  /// The vowel/tanwin/sukun mark, if any.
  std::optional<char32_t> vowel() const {
    if (diacritics.empty() || diacritics.back() == cp::kShadda) return std::nullopt;
    return diacritics.back();
  }

  friend bool operator==(const Grapheme&, const Grapheme&) = default;
};

using GraphemeString = std::vector<Grapheme>;

// ---------------------------------------------------------------------------
// Alphabet

/// Letters accepted as grapheme bases. The Unicode 5.1 additions at
/// U+063B..U+063F are non-MSA letters and are rejected.
constexpr bool is_base_letter(char32_t c) {
  return (c >= 0x0621 && c <= 0x063A) || (c >= 0x0641 && c <= 0x064A) ||
         c == cp::kAlefWasla;
}

constexpr bool is_vowel_mark(char32_t c) {
  return (c >= cp::kFathatan && c <= cp::kKasra) || c == cp::kSukun;
}

constexpr bool is_diacritic(char32_t c) {
  return is_vowel_mark(c) || c == cp::kShadda;
}

/// All supported base letters in codepoint order.
inline const std::vector<char32_t>& base_letters() {
  static const std::vector<char32_t> letters = [] {
    std::vector<char32_t> v;
    for (char32_t c = 0x0621; c <= cp::kAlefWasla; ++c)
      if (is_base_letter(c)) v.push_back(c);
    return v;
  }();
  return letters;
}

/// Every well-formed diacritic sequence: none, a single vowel mark, shadda,
/// or shadda followed by a vowel mark (16 in total).
inline const std::vector<std::u32string>& diacritic_sets() {
  static const std::vector<std::u32string> sets = [] {
    const std::array<char32_t, 7> vowels = {cp::kFatha,    cp::kDamma,
                                            cp::kKasra,    cp::kFathatan,
                                            cp::kDammatan, cp::kKasratan,
                                            cp::kSukun};
    std::vector<std::u32string> v;
    v.emplace_back();
    for (char32_t m : vowels) v.emplace_back(1, m);
    v.emplace_back(1, cp::kShadda);
    for (char32_t m : vowels) v.push_back(std::u32string{cp::kShadda, m});
    return v;
  }();
  return sets;
}

// ---------------------------------------------------------------------------
// Buckwalter table

struct TranslitEntry {
  char32_t code;
  char ascii;
};

inline constexpr std::array<TranslitEntry, 46> kTranslitTable = {{
    {0x0020, ' '},  {0x0621, '\''}, {0x0622, '|'}, {0x0623, '>'},
    {0x0624, '&'},  {0x0625, '<'},  {0x0626, '}'}, {0x0627, 'A'},
    {0x0628, 'b'},  {0x0629, 'p'},  {0x062A, 't'}, {0x062B, 'v'},
    {0x062C, 'j'},  {0x062D, 'H'},  {0x062E, 'x'}, {0x062F, 'd'},
    {0x0630, '*'},  {0x0631, 'r'},  {0x0632, 'z'}, {0x0633, 's'},
    {0x0634, '$'},  {0x0635, 'S'},  {0x0636, 'D'}, {0x0637, 'T'},
    {0x0638, 'Z'},  {0x0639, 'E'},  {0x063A, 'g'}, {0x0641, 'f'},
    {0x0642, 'q'},  {0x0643, 'k'},  {0x0644, 'l'}, {0x0645, 'm'},
    {0x0646, 'n'},  {0x0647, 'h'},  {0x0648, 'w'}, {0x0649, 'Y'},
    {0x064A, 'y'},  {0x0671, '{'},  {0x064B, 'F'}, {0x064C, 'N'},
    {0x064D, 'K'},  {0x064E, 'a'},  {0x064F, 'u'}, {0x0650, 'i'},
    {0x0651, '~'},  {0x0652, 'o'},
}};

inline std::optional<char> to_ascii(char32_t c) {
  for (const auto& e : kTranslitTable)
    if (e.code == c) return e.ascii;
  return std::nullopt;
}

inline std::optional<char32_t> from_ascii(char a) {
  for (const auto& e : kTranslitTable)
    if (e.ascii == a) return e.code;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// UTF-8 <-> UTF-32. Invalid UTF-8 decodes to U+FFFD.

inline std::u32string to_u32(std::string_view utf8) {
  const icu::UnicodeString us = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  std::u32string out;
  for (int32_t i = 0; i < us.length(); i = us.moveIndex32(i, 1))
    out.push_back(static_cast<char32_t>(us.char32At(i)));
  return out;
}

inline std::string to_utf8(std::u32string_view text) {
  icu::UnicodeString us;
  for (char32_t c : text) us.append(static_cast<UChar32>(c));
  std::string out;
  us.toUTF8String(out);
  return out;
}

// ---------------------------------------------------------------------------
// Operations

/// NFC, no tatweel, whitespace runs collapsed to one U+0020, trimmed.
inline std::string normalize(std::string_view text) {
  std::u32string cleaned;
  bool pending_space = false;
  for (char32_t c : to_u32(text)) {
    if (c == cp::kTatweel) continue;
    if (u_isUWhiteSpace(static_cast<UChar32>(c))) {
      pending_space = !cleaned.empty();
      continue;
    }
    if (pending_space) cleaned.push_back(cp::kSpace);
    pending_space = false;
    cleaned.push_back(c);
  }

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  icu::UnicodeString us;
  for (char32_t c : cleaned) us.append(static_cast<UChar32>(c));
  icu::UnicodeString composed = nfc->normalize(us, status);
  if (U_FAILURE(status)) return to_utf8(cleaned);
  std::string out;
  composed.toUTF8String(out);
  return out;
}

namespace detail {

inline std::string describe(char32_t c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(c));
  return buf;
}

/// Attaches diacritics to the preceding base letter. With `strict_order`,
/// a vowel mark followed by shadda is rejected instead of reordered.
inline GraphemeString segment(std::u32string_view codes, bool strict_order) {
  GraphemeString out;
  for (char32_t c : codes) {
    if (is_base_letter(c) || c == cp::kSpace) {
      out.push_back(Grapheme{c, {}});
      continue;
    }
    if (!is_diacritic(c))
      throw MalformedText("unsupported codepoint " + describe(c));
    if (out.empty() || out.back().is_space())
      throw MalformedText("diacritic " + describe(c) + " has no base letter");
    Grapheme& g = out.back();
    if (c == cp::kShadda) {
      if (g.has_shadda()) throw MalformedText("repeated shadda");
      if (strict_order && g.vowel())
        throw MalformedText("shadda after vowel mark");
      g.diacritics.insert(g.diacritics.begin(), c);
    } else {
      if (g.vowel()) throw MalformedText("more than one vowel mark");
      g.diacritics.push_back(c);
    }
  }
  return out;
}

}  // namespace detail

/// Splits normalized text into graphemes. Throws MalformedText on a
/// diacritic without a base letter or on any unsupported codepoint.
inline GraphemeString segment_graphemes(std::string_view normalized) {
  return detail::segment(to_u32(normalized), /*strict_order=*/false);
}

/// All codepoints of `gs` in storage order.
inline std::u32string codepoints(const GraphemeString& gs) {
  std::u32string out;
  for (const auto& g : gs) {
    out.push_back(g.base);
    out += g.diacritics;
  }
  return out;
}

inline std::string to_utf8(const GraphemeString& gs) {
  return to_utf8(codepoints(gs));
}

inline std::string transliterate(const GraphemeString& gs) {
  std::string out;
  for (char32_t c : codepoints(gs)) {
    auto a = to_ascii(c);
    if (!a) throw UnknownSymbol("no romanization for " + detail::describe(c));
    out.push_back(*a);
  }
  return out;
}

/// Inverse of transliterate. Throws UnknownSymbol for characters outside
/// the table and MalformedText for sequences that are not in canonical
/// grapheme form (e.g. "a~" instead of "~a").
inline GraphemeString transliterate_inverse(std::string_view ascii) {
  std::u32string codes;
  codes.reserve(ascii.size());
  for (char a : ascii) {
    auto c = from_ascii(a);
    if (!c) throw UnknownSymbol(std::string("unknown symbol '") + a + "'");
    codes.push_back(*c);
  }
  return detail::segment(codes, /*strict_order=*/true);
}

inline GraphemeString strip_diacritics(const GraphemeString& gs) {
  GraphemeString out;
  out.reserve(gs.size());
  for (const auto& g : gs) out.push_back(Grapheme{g.base, {}});
  return out;
}

/// Base letters only, spaces included.
inline std::u32string bases(const GraphemeString& gs) {
  std::u32string out;
  for (const auto& g : gs) out.push_back(g.base);
  return out;
}

/// Splits on space graphemes. Consecutive spaces yield empty words so that
/// positional pairing is preserved.
inline std::vector<GraphemeString> split_words(const GraphemeString& gs) {
  std::vector<GraphemeString> words(1);
  for (const auto& g : gs) {
    if (g.is_space())
      words.emplace_back();
    else
      words.back().push_back(g);
  }
  if (gs.empty()) words.clear();
  return words;
}

}  // namespace proncoach

#endif  // PRONCOACH_ARABIC_TEXT_HPP_
