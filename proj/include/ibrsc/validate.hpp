#pragma once

#include <string>
#include <vector>

#include "ibrsc/netmodel.hpp"

namespace ibrsc {

enum class Severity { Warning, Error };

enum class IssueCategory {
    DuplicateId,
    DanglingReference,
    PhaseMismatch,
    InvalidParameter,
    ZeroImpedanceLoop,
    NoReferenceSource,
};

struct ValidationIssue {
    Severity severity = Severity::Error;
    IssueCategory category = IssueCategory::InvalidParameter;
    std::string subject;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool ok() const;
    bool has(IssueCategory c) const;
    std::string summary() const;
};

std::string to_string(IssueCategory c);

ValidationReport validate(const NetworkModel& net);

/// Throws InputError carrying the report summary when validation fails.
void require_valid(const NetworkModel& net);

/// Bus islands formed by branches, transformers, regulators and switches with
/// at least one closed phase. Returns the island id of every bus.
std::vector<int> bus_islands(const NetworkModel& net, int* island_count = nullptr);

}  // namespace ibrsc
