#ifndef TEV_TEV_HPP
#define TEV_TEV_HPP

#include "tev/error.hpp"
#include "tev/forward.hpp"
#include "tev/io.hpp"
#include "tev/liouville.hpp"
#include "tev/marchenko.hpp"
#include "tev/ode.hpp"
#include "tev/profiles.hpp"
#include "tev/reconstruct.hpp"
#include "tev/rh.hpp"
#include "tev/validation.hpp"

#endif  // TEV_TEV_HPP
