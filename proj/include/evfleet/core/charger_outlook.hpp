#pragma once

#include <vector>

namespace evfleet {

// Commitments of one charger as seen at a decision instant: the session in
// progress, the FIFO queue, and vehicles already driving there.
struct ChargerOutlook {
  struct Inbound {
    double eta = 0.0;
    double duration = 0.0;
  };

  double busy_until = 0.0;                // end of the session in progress
  std::vector<double> queued_durations;   // FIFO order
  std::vector<Inbound> inbound;           // any order

  // Queueing delay of a vehicle reaching the charger at `arrival`, assuming
  // everything ahead of it is served FIFO. Inbound vehicles arriving strictly
  // earlier are ahead; later ones are not.
  double PredictWait(double now, double arrival) const;
};

}  // namespace evfleet
