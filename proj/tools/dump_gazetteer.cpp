// Prints the built-in gazetteer as JSON (the source of data/gazetteer.json).

#include <iostream>

#include "groupkb/gazetteer.hpp"

int main() {
    std::cout << groupkb::default_gazetteer().to_json().dump(2, ' ', false) << "\n";
    return 0;
}
