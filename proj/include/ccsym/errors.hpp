#ifndef CCSYM_ERRORS_HPP
#define CCSYM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ccsym {

/// Common base so callers can catch everything from this library at once.
struct error : std::runtime_error {
	using std::runtime_error::runtime_error;
};

/// Invalid ring descriptor (duplicate generator, order < 2, bad modulus, ...).
struct descriptor_error : error {
	using error::error;
};

/// Text input rejected; `pos` is a byte offset into the input.
struct parse_error : error {
	std::size_t pos;
	parse_error(const std::string &msg, std::size_t p)
	    : error(msg + " (at position " + std::to_string(p) + ")"), pos(p)
	{}
};

/// An operation needed coefficients beyond the known precision of its input.
struct precision_error : error {
	using error::error;
};

/// Argument required to be invertible is not.
struct not_a_unit_error : error {
	using error::error;
};

/// Argument fails a shape/domain precondition (wrong subgroup, not sharp, ...).
struct domain_error : error {
	using error::error;
};

/// Truncation window too small to certify a determinant; retry with larger M.
struct window_error : error {
	using error::error;
};

/// Two independent computations of the same value disagree, or a value does
/// not have the shape the theory guarantees.
struct consistency_error : error {
	using error::error;
};

/// A loop exceeded a cap derived from the ring invariants. Always a bug.
struct internal_error : error {
	using error::error;
};

} // namespace ccsym

#endif
