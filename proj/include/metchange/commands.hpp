#ifndef METCHANGE_COMMANDS_HPP
#define METCHANGE_COMMANDS_HPP

#include "metchange/config.hpp"

#include <ostream>

namespace metchange {

// Command implementations behind the CLI. Each reads only its inputs and the
// config, writes into output_dir, and reports progress and warnings on `log`.
// Errors are thrown; the caller turns them into a nonzero exit status.
//
// Randomness: every consumer derives its seed from the root `seed` key,
//   MON        derive_seed(derive_seed(derive_seed(seed, "mon"), lexeme), slice)
//   spearman   derive_seed(derive_seed(seed, "spearman"), measure + "/" + subset)
//   annotate   derive_seed(seed, "annotate")

void run_build(const Config& config, std::ostream& log);
void run_score(const Config& config, std::ostream& log);
void run_eval(const Config& config, std::ostream& log);
void run_annotate(const Config& config, std::ostream& log);
void run_agreement(const Config& config, std::ostream& log);

} // namespace metchange

#endif
