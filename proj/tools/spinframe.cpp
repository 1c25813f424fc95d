// SPDX-License-Identifier: Apache-2.0
#include "spinframe/app.hpp"

int main(int argc, char** argv) { return spinframe::run_cli(argc, argv); }
