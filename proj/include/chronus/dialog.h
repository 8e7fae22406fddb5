#ifndef CHRONUS_DIALOG_H_
#define CHRONUS_DIALOG_H_

#include "chronus/concepts.h"
#include "chronus/template.h"

namespace chronus {

// Context carried across the turns of one session; at most one token per
// keyword.
struct DialogState {
  Template context;
  int turn = 0;
};

struct MergeResult {
  DialogState state;
  Template merged;  // answer basis; identical to state.context
};

// Merges a new template into the context. A changed value for a top-rank
// keyword (origin, destin) starts a new context; any other changed value
// deletes the context tokens ranked strictly below it. New tokens are then
// overlaid on what survives.
MergeResult MergeContext(const DialogState &state, const Template &incoming,
                         const ConceptDictionary &dictionary);

// An elliptical turn carries neither a question nor a subject token and
// needs a context to be answerable.
bool IsElliptical(const Template &tmpl, const ConceptDictionary &dictionary);

}  // namespace chronus

#endif  // CHRONUS_DIALOG_H_
