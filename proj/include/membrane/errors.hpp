#ifndef MEMBRANE_ERRORS_HPP
#define MEMBRANE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace membrane {

// Any violated precondition on model or operation inputs.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class ZeroConstantTerm : public DomainError {
public:
    ZeroConstantTerm() : DomainError("series has zero constant term") {}
};

class SingularConstantTerm : public DomainError {
public:
    SingularConstantTerm() : DomainError("constant-term matrix is singular") {}
};

class OrderTooLow : public DomainError {
public:
    using DomainError::DomainError;
};

class BudgetExceeded : public DomainError {
public:
    using DomainError::DomainError;
};

class YNotInE : public DomainError {
public:
    YNotInE() : DomainError("target site vector has no coordinate on a receptor") {}
};

class StartOnReceptor : public DomainError {
public:
    StartOnReceptor() : DomainError("start lies on a receptor; use the receptor-start route") {}
};

class NumericDomain : public DomainError {
public:
    using DomainError::DomainError;
};

}  // namespace membrane

#endif  // MEMBRANE_ERRORS_HPP
