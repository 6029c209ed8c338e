#pragma once
#include <stdexcept>
#include <string>

namespace qdef {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// s within 1e-12 of a multiple of pi
struct SingularDeformation : DomainError {
    using DomainError::DomainError;
};

struct UnitarityViolation : DomainError {
    using DomainError::DomainError;
};

struct BranchMismatch : DomainError {
    using DomainError::DomainError;
};

struct InsufficientGrid : DomainError {
    using DomainError::DomainError;
};

struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qdef
