#include <stdio.h>
#include "geiringer.h"

int main(void) {
    const char *text = "alpha: 1/a, 2/a -> f1\nbeta: 2/b, 1/b -> f2\n";
    GeiringerPopulation *pop = NULL;
    if (geiringer_population_parse(text, &pop) != GEIRINGER_STATUS_OK) {
        fprintf(stderr, "%s\n", geiringer_last_error());
        return 1;
    }
    char *value = NULL;
    GeiringerStatus st = geiringer_orbit_frequency(pop, "alpha: 1, 2 -> f1", false, true, GEIRINGER_DEFAULT_CAP, &value);
    if (st != GEIRINGER_STATUS_OK) {
        fprintf(stderr, "%s\n", geiringer_last_error());
        geiringer_population_free(pop);
        return 1;
    }
    printf("%s\n", value);
    geiringer_string_free(value);
    geiringer_population_free(pop);
    return 0;
}
