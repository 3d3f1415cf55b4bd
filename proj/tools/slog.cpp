#include <cstdio>
int main() { std::puts("slog: cli not wired up yet"); return 2; }
