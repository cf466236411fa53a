/** Discover 'Em: one creature at a time, keep it or skip to the next.
 * Keeping is the first-feed adoption call; the kept creature then shows
 * up in the Feed 'Em view. A 503 from the render backend becomes a retry
 * banner instead of a dead page. */

import { ApiClient, ApiError, DiscoverPayload, FeedPayload } from "../api.js";

export interface DiscoverState {
  userId: string;
  worldId: string | null;
  card: DiscoverPayload | null;
  loading: boolean;
  retryBanner: string | null;
  discoveries: number;
}

export class DiscoverPage {
  readonly state: DiscoverState;

  constructor(private readonly api: ApiClient, userId: string) {
    this.state = {
      userId,
      worldId: null,
      card: null,
      loading: false,
      retryBanner: null,
      discoveries: 0,
    };
  }

  /** Establish the session (world assignment) and show the first card. */
  async load(): Promise<void> {
    const assigned = await this.api.assign(this.state.userId);
    this.state.worldId = assigned.world_id;
    await this.next();
  }

  private async next(): Promise<void> {
    this.state.loading = true;
    try {
      this.state.card = await this.api.discover(this.state.userId);
      this.state.discoveries += 1;
      this.state.retryBanner = null;
    } catch (err) {
      if (err instanceof ApiError && err.status === 503) {
        this.state.retryBanner = err.detail;
        return;
      }
      throw err;
    } finally {
      this.state.loading = false;
    }
  }

  /** Keep the current creature, then move on to the next one. */
  async keep(): Promise<FeedPayload> {
    if (!this.state.card) throw new Error("no creature on display");
    const fed = await this.api.feed(this.state.userId, this.state.card.id);
    await this.next();
    return fed;
  }

  async skip(): Promise<void> {
    await this.next();
  }

  async retry(): Promise<void> {
    this.state.retryBanner = null;
    await this.next();
  }
}
