#include "ocrqa/alignment.hpp"

namespace ocrqa {

std::string_view to_string(EditKind kind) {
  switch (kind) {
    case EditKind::Match:
      return "match";
    case EditKind::Substitute:
      return "substitute";
    case EditKind::Delete:
      return "delete";
    case EditKind::Insert:
      return "insert";
  }
  return "?";
}

}  // namespace ocrqa
