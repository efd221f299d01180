#include <algorithm>
#include <tuple>
#include <span>

#include "ocrqa/metrics.hpp"

namespace ocrqa {

namespace {

template <typename T>
class FlexMatcher {
 public:
  FlexMatcher(std::vector<std::span<const T>> gt, std::vector<std::span<const T>> ocr)
      : gt_(std::move(gt)), ocr_(std::move(ocr)), gt_done_(gt_.size(), false) {}

  FlexMatchTrace run() {
    FlexMatchTrace trace;
    trace.gt_line_errors.assign(gt_.size(), 0);

    std::size_t pending = 0;
    for (std::size_t g = 0; g < gt_.size(); ++g) {
      if (gt_[g].empty()) {
        gt_done_[g] = true;  // contributes no units and never matches
        continue;
      }
      ++pending;
    }
    rank_gt_lines();
    for (const auto& g : gt_) gt_sorted_.push_back(sorted_copy(g));
    std::vector<Candidate> initial;
    for (std::size_t o = 0; o < ocr_.size(); ++o) {
      if (!ocr_[o].empty()) add_fragment({o, 0, ocr_[o].size()}, initial);
    }
    heap_ = std::move(initial);
    std::make_heap(heap_.begin(), heap_.end(), Later{this});

    while (pending > 0 && !heap_.empty()) {
      std::pop_heap(heap_.begin(), heap_.end(), Later{this});
      Candidate c = heap_.back();
      heap_.pop_back();
      if (gt_done_[c.gt] || !alive_[c.fragment]) continue;
      if (!c.exact) {
        // A lower bound reached the top; replace it with the real cost.
        const SubstringMatch m =
            substring_distance(gt_[c.gt], fragment_text(c.fragment), SpanPreference::Longest);
        c.cost = static_cast<std::uint32_t>(m.error_count);
        c.start = static_cast<std::uint32_t>(m.start);
        c.end = static_cast<std::uint32_t>(m.end);
        c.exact = true;
        push(c);
        continue;
      }

      const OcrFragment frag = fragments_[c.fragment];
      gt_done_[c.gt] = true;
      alive_[c.fragment] = false;
      --pending;
      --live_fragments_;

      const std::size_t begin = frag.begin + c.start;
      const std::size_t end = frag.begin + c.end;
      trace.pairs.push_back({c.gt, frag.ocr_line, begin, end, static_cast<std::int64_t>(c.cost)});
      trace.gt_line_errors[c.gt] = c.cost;
      trace.pair_errors += c.cost;

      if (begin > frag.begin) push_fragment({frag.ocr_line, frag.begin, begin});
      if (frag.end > end) push_fragment({frag.ocr_line, end, frag.end});
      // At most pending * live_fragments entries are still usable; drop the rest
      // once they dominate the heap.
      if (heap_.size() > 2 * pending * live_fragments_ + 64) compact();
    }

    for (std::size_t g = 0; g < gt_.size(); ++g) {
      if (gt_done_[g]) continue;
      trace.unmatched_gt.push_back(g);
      trace.gt_line_errors[g] = static_cast<std::int64_t>(gt_[g].size());
      trace.unmatched_gt_units += static_cast<std::int64_t>(gt_[g].size());
    }
    for (std::size_t f = 0; f < fragments_.size(); ++f) {
      if (!alive_[f]) continue;
      trace.leftover_ocr.push_back(fragments_[f]);
      trace.leftover_ocr_units += static_cast<std::int64_t>(fragments_[f].length());
    }
    std::sort(trace.leftover_ocr.begin(), trace.leftover_ocr.end(),
              [](const OcrFragment& a, const OcrFragment& b) {
                return std::tie(a.ocr_line, a.begin) < std::tie(b.ocr_line, b.begin);
              });
    return trace;
  }

 private:
  struct Candidate {
    std::uint32_t gt;
    std::uint32_t fragment;
    std::uint32_t cost;
    std::uint32_t start;  // relative to the fragment
    std::uint32_t end;
    bool exact;  // false: cost is only a lower bound
  };

  std::span<const T> fragment_text(std::size_t f) const {
    const OcrFragment& frag = fragments_[f];
    return ocr_[frag.ocr_line].subspan(frag.begin, frag.length());
  }

  // True when a should be taken before b.
  bool precedes(const Candidate& a, const Candidate& b) const {
    const std::uint64_t lhs = std::uint64_t{a.cost} * gt_[b.gt].size();
    const std::uint64_t rhs = std::uint64_t{b.cost} * gt_[a.gt].size();
    if (lhs != rhs) return lhs < rhs;
    if (gt_rank_[a.gt] != gt_rank_[b.gt]) return gt_rank_[a.gt] < gt_rank_[b.gt];
    if (a.fragment != b.fragment) {
      const auto fa = fragment_text(a.fragment);
      const auto fb = fragment_text(b.fragment);
      if (!std::ranges::equal(fa, fb)) return std::ranges::lexicographical_compare(fa, fb);
    }
    if (a.gt != b.gt) return a.gt < b.gt;
    return a.fragment < b.fragment;
  }

  struct Later {
    const FlexMatcher* self;
    bool operator()(const Candidate& a, const Candidate& b) const { return self->precedes(b, a); }
  };

  static std::vector<T> sorted_copy(std::span<const T> text) {
    std::vector<T> out(text.begin(), text.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  // Every GT item without a counterpart in the fragment costs at least one edit.
  static std::uint32_t lower_bound(const std::vector<T>& gt, const std::vector<T>& fragment) {
    std::size_t common = 0;
    for (auto a = gt.begin(), b = fragment.begin(); a != gt.end() && b != fragment.end();) {
      if (*a < *b) {
        ++a;
      } else if (*b < *a) {
        ++b;
      } else {
        ++common, ++a, ++b;
      }
    }
    return static_cast<std::uint32_t>(gt.size() - common);
  }

  // Longer GT lines first, then lexicographic; identical lines share a rank.
  void rank_gt_lines() {
    std::vector<std::uint32_t> order(gt_.size());
    for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
    auto before = [&](std::uint32_t a, std::uint32_t b) {
      if (gt_[a].size() != gt_[b].size()) return gt_[a].size() > gt_[b].size();
      return std::ranges::lexicographical_compare(gt_[a], gt_[b]);
    };
    std::sort(order.begin(), order.end(), before);
    gt_rank_.assign(gt_.size(), 0);
    for (std::size_t i = 1; i < order.size(); ++i) {
      gt_rank_[order[i]] = gt_rank_[order[i - 1]] + (before(order[i - 1], order[i]) ? 1 : 0);
    }
  }

  void add_fragment(OcrFragment frag, std::vector<Candidate>& out) {
    const auto id = static_cast<std::uint32_t>(fragments_.size());
    fragments_.push_back(frag);
    alive_.push_back(true);
    ++live_fragments_;
    const std::vector<T> sorted = sorted_copy(fragment_text(id));
    for (std::size_t g = 0; g < gt_.size(); ++g) {
      if (gt_done_[g]) continue;
      out.push_back({static_cast<std::uint32_t>(g), id, lower_bound(gt_sorted_[g], sorted), 0, 0, false});
    }
  }

  void push(const Candidate& c) {
    heap_.push_back(c);
    std::push_heap(heap_.begin(), heap_.end(), Later{this});
  }

  void compact() {
    std::erase_if(heap_, [&](const Candidate& c) { return gt_done_[c.gt] || !alive_[c.fragment]; });
    std::make_heap(heap_.begin(), heap_.end(), Later{this});
  }

  void push_fragment(OcrFragment frag) {
    std::vector<Candidate> fresh;
    add_fragment(frag, fresh);
    for (const Candidate& c : fresh) push(c);
  }

  std::vector<std::span<const T>> gt_;
  std::vector<std::span<const T>> ocr_;
  std::vector<bool> gt_done_;
  std::vector<std::vector<T>> gt_sorted_;
  std::vector<std::uint32_t> gt_rank_;
  std::vector<OcrFragment> fragments_;
  std::vector<bool> alive_;
  std::vector<Candidate> heap_;  // max-heap under Later: top precedes all others
  std::size_t live_fragments_ = 0;
};

template <typename Container>
auto spans_of(const std::vector<Container>& lines) {
  using T = typename Container::value_type;
  std::vector<std::span<const T>> out;
  out.reserve(lines.size());
  for (const auto& line : lines) out.emplace_back(line.data(), line.size());
  return out;
}

}  // namespace

FlexMatchTrace flex_match(const std::vector<std::u32string>& gt,
                          const std::vector<std::u32string>& ocr) {
  return FlexMatcher<char32_t>(spans_of(gt), spans_of(ocr)).run();
}

FlexMatchTrace flex_match(const std::vector<SymbolLine>& gt, const std::vector<SymbolLine>& ocr) {
  return FlexMatcher<Symbol>(spans_of(gt), spans_of(ocr)).run();
}

}  // namespace ocrqa
