#pragma once

#include "core/compiler.hpp"
#include "core/costmodel.hpp"
#include "core/ground.hpp"
#include "core/query.hpp"

namespace dmln {

// The data-movement views a task registers, with the consuming algorithm's
// access pattern and access-count estimate t:
//   - classification tasks probe per object, so each rule body becomes a
//     view bound on the object's arguments and free on the existentials;
//   - coref tasks probe neighborhoods, one bf view per positive soft rule,
//     t = node count / average positive degree;
//   - chain and generic tasks register their grounding views all-free, t = 1.
std::vector<AdornedView> register_dmos(const MLNProgram& program,
                                       const GroundDatabase& db,
                                       const Task& task,
                                       const Catalog& catalog);

}  // namespace dmln
