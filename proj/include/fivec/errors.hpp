#pragma once

#include <stdexcept>
#include <string>

namespace fivec {

// Error taxonomy shared by the whole toolkit. The CLI maps ArgumentError /
// ValidationError / ParseError to exit code 2 (usage or config problem) and
// everything else to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input file does not parse (JSON syntax, CSV cell, number format).
class ParseError : public Error {
public:
    using Error::Error;
};

// Input parses but violates a documented invariant (duplicate ids, empty
// corpus, missing concept key, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Out-of-range or malformed argument to a library call.
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Caller broke an interface contract (column mismatch, wrong itemset length).
class ContractError : public Error {
public:
    using Error::Error;
};

// Operation is not defined for this input (importance of a non-tree model,
// AUC of a single-class label vector, too many features for exact Shapley).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

// Filesystem failure.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace fivec
