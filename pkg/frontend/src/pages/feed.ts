/** Feed 'Em: the world population with a feed button per creature.
 * The server delivers the list already ordered by energy; the linear
 * variant renders it as-is, the spatial variant scatters the same data
 * at id-hashed positions. Feeding patches the energy badge from the
 * response instead of reloading the page; removed creatures drop out on
 * the next poll because the server stops sending them. */

import { ApiClient, FeedPayload, PopulationEntry } from "../api.js";
import { ScatterPosition, scatterPosition } from "../layout.js";

export interface FeedEntryView extends PopulationEntry {
  position: ScatterPosition | null;
}

export interface FeedState {
  userId: string;
  worldId: string | null;
  layoutVariant: string | null;
  tick: number;
  entries: FeedEntryView[];
}

export class FeedPage {
  readonly state: FeedState;

  constructor(private readonly api: ApiClient, userId: string) {
    this.state = { userId, worldId: null, layoutVariant: null, tick: 0, entries: [] };
  }

  async poll(): Promise<void> {
    const world = await this.api.world(this.state.userId);
    this.state.worldId = world.world_id;
    this.state.layoutVariant = world.layout_variant;
    this.state.tick = world.tick;
    const spatial = world.layout_variant === "spatial";
    this.state.entries = world.population.map((entry) => ({
      ...entry,
      position: spatial ? scatterPosition(entry.ganimal_id) : null,
    }));
  }

  /** Feed one creature and update its badge in place. */
  async feedOne(ganimalId: string): Promise<FeedPayload> {
    const fed = await this.api.feed(this.state.userId, ganimalId);
    const entry = this.state.entries.find((e) => e.ganimal_id === ganimalId);
    if (entry) {
      entry.energy = fed.energy;
      entry.energy_exact = fed.energy_exact;
      entry.last_fed_tick = fed.last_fed_tick;
    }
    return fed;
  }
}
