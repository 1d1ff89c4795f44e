// Acceptance suite: one pass/fail line per criterion. Placeholder main while
// the library is under construction; criteria are filled in below.
#include <cstdio>

int main() {
    std::puts("acceptance suite placeholder");
    return 0;
}
