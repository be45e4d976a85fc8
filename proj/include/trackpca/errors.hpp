#pragma once

#include <stdexcept>
#include <string>

namespace trackpca {

/// Coarse error class; the CLI maps each one to an exit status.
enum class ErrorCategory { usage, data, numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), category_(category), kind_(kind) {}

    ErrorCategory category() const noexcept { return category_; }
    const std::string& kind() const noexcept { return kind_; }

private:
    ErrorCategory category_;
    std::string kind_;
};

#define TRACKPCA_DEFINE_ERROR(Name, category, tag)                                         \
    class Name : public Error {                                                            \
    public:                                                                                \
        explicit Name(const std::string& what) : Error(ErrorCategory::category, tag, what) {} \
    }

TRACKPCA_DEFINE_ERROR(ParameterError, usage, "parameter_error");
TRACKPCA_DEFINE_ERROR(IoError, data, "io_error");
TRACKPCA_DEFINE_ERROR(ParseError, data, "parse_error");
TRACKPCA_DEFINE_ERROR(SchemaError, data, "schema_error");
TRACKPCA_DEFINE_ERROR(ValidationError, data, "validation_error");
TRACKPCA_DEFINE_ERROR(LookupError, data, "lookup_error");
TRACKPCA_DEFINE_ERROR(AggregationError, data, "aggregation_error");
TRACKPCA_DEFINE_ERROR(ZeroVarianceError, numerical, "zero_variance_error");
TRACKPCA_DEFINE_ERROR(ConvergenceError, numerical, "convergence_error");
TRACKPCA_DEFINE_ERROR(RankError, numerical, "rank_error");
TRACKPCA_DEFINE_ERROR(InsufficientDataError, numerical, "insufficient_data_error");
TRACKPCA_DEFINE_ERROR(DomainError, numerical, "domain_error");

#undef TRACKPCA_DEFINE_ERROR

}  // namespace trackpca
