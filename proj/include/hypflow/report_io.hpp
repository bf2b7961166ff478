#pragma once

#include <iosfwd>
#include <span>

#include "hypflow/flows.hpp"
#include "hypflow/verify.hpp"

namespace hypflow {

/// name,k,m,shape_id,resolution,lhs,rhs,slack,relative_slack,tolerance,verdict,hypothesis_ok,exploratory,rhs_alt,rhs_agreement,note
void write_reports_csv(std::ostream& out, std::span<const InequalityReport> reports);
/// Aligned table plus a verdict tally.
void write_reports_text(std::ostream& out, std::span<const InequalityReport> reports);

void write_audit_text(std::ostream& out, const AuditReport& audit);
void write_consistency_text(std::ostream& out, const ConsistencyReport& rep);
/// Status, step counts, decay fit, r_inf and the C0 barrier of a finished run.
void write_flow_summary(std::ostream& out, const FlowResult& res, const FlowSpec& spec);

}  // namespace hypflow
