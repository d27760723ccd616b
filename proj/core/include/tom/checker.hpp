#ifndef TOM_CHECKER_HPP
#define TOM_CHECKER_HPP

#include <vector>

#include "tom/ast.hpp"
#include "tom/source.hpp"

namespace tom {

// Static checks over a freshly parsed program: duplicate entities, name and
// type resolution, literal-only field initializers, and the all-paths-return
// rule for non-void bodies. Call resolution results are annotated onto the
// AST for the interpreter and the dependency extractor.
void check_program(Program& prog, std::vector<Diagnostic>& diags);

} // namespace tom

#endif
