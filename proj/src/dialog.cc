#include "chronus/dialog.h"

#include <algorithm>

namespace chronus {
namespace {

constexpr int kTopRank = 0;

}  // namespace

MergeResult MergeContext(const DialogState &state, const Template &incoming,
                         const ConceptDictionary &dictionary) {
  std::vector<TemplateToken> context = state.context.tokens;

  auto changed = [&](const TemplateToken &t) {
    for (const TemplateToken &c : context) {
      if (c.keyword == t.keyword) return c.value != t.value;
    }
    return false;
  };

  bool restart = false;
  for (const TemplateToken &t : incoming.tokens) {
    if (dictionary.KeywordRank(t.keyword) == kTopRank && changed(t)) restart = true;
  }
  if (restart) {
    context.clear();
  } else {
    int cutoff = -1;  // delete context tokens ranked strictly below this
    for (const TemplateToken &t : incoming.tokens) {
      if (!changed(t)) continue;
      const int rank = dictionary.KeywordRank(t.keyword);
      cutoff = cutoff < 0 ? rank : std::min(cutoff, rank);
    }
    if (cutoff >= 0) {
      std::erase_if(context, [&](const TemplateToken &c) {
        return dictionary.KeywordRank(c.keyword) > cutoff;
      });
    }
  }

  for (const TemplateToken &t : incoming.tokens) {
    auto it = std::find_if(context.begin(), context.end(),
                           [&](const TemplateToken &c) { return c.keyword == t.keyword; });
    if (it != context.end()) {
      it->value = t.value;
      it->segment = t.segment;
    } else {
      context.push_back(t);
    }
  }

  MergeResult result;
  result.state.context.tokens = std::move(context);
  result.state.turn = state.turn + 1;
  result.merged = result.state.context;
  result.merged.unmatched = incoming.unmatched;
  return result;
}

bool IsElliptical(const Template &tmpl, const ConceptDictionary &dictionary) {
  for (const TemplateToken &t : tmpl.tokens) {
    auto index = dictionary.Find(t.keyword);
    if (!index) continue;
    Role role = dictionary.at(*index).role;
    if (role == Role::kQuestion || role == Role::kSubject) return false;
  }
  return true;
}

}  // namespace chronus
