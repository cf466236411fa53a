/** Typed client for the platform API. Every page talks to the service
 * through this module and renders payloads verbatim; nothing in the
 * client re-derives genomes, sampling, or statistics. */

export interface ImageRefPayload {
  content_digest: string;
  uri: string;
  width: number;
  height: number;
}

export interface GenomePayload {
  components: [number, number][];
  truncation: number;
  noise_seed: number;
  generation: string;
}

export interface GanimalPayload {
  id: string;
  genome: GenomePayload;
  generation: string;
  image: ImageRefPayload;
  name: string | null;
  lineage: string[];
  world_id: string;
  created_tick: number;
  creator: string | null;
  permalink: string;
}

export interface DiscoverPayload extends GanimalPayload {
  procedure: string;
  new: boolean;
  fallback: boolean;
  served_world_id: string;
}

export interface AssignPayload {
  user_id: string;
  world_id: string;
}

export interface FeedPayload {
  ganimal_id: string;
  world_id: string;
  energy: number;
  energy_exact: string;
  last_fed_tick: number;
  adopted: boolean;
}

export interface PopulationEntry {
  ganimal_id: string;
  name: string | null;
  generation: string;
  energy: number;
  energy_exact: string;
  last_fed_tick: number;
  image_uri: string;
}

export interface WorldPayload {
  user_id: string;
  world_id: string;
  layout_variant: string;
  tick: number;
  seed_set_size: number;
  population: PopulationEntry[];
}

export interface LeaderboardEntry {
  rank: number;
  ganimal_id: string;
  name: string | null;
  mean: number;
  alive: boolean;
  image_uri: string;
}

export interface LeaderboardPayload {
  world_id: string;
  characteristic: string;
  entries: LeaderboardEntry[];
}

export interface AnnotatePayload {
  status: string;
  ganimal_id: string;
  world_id: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    readonly detail: string,
  ) {
    super(`${code}: ${detail}`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(this.baseUrl + path, init);
    const text = await resp.text();
    if (!resp.ok) {
      let code = "HttpError";
      let detail = text || `status ${resp.status}`;
      try {
        const parsed = JSON.parse(text);
        if (typeof parsed.error === "string") code = parsed.error;
        if (typeof parsed.detail === "string") detail = parsed.detail;
      } catch {
        // non-JSON error body; keep the raw text
      }
      throw new ApiError(resp.status, code, detail);
    }
    return JSON.parse(text) as T;
  }

  assign(userId: string): Promise<AssignPayload> {
    return this.request("POST", "/api/assign", { user_id: userId });
  }

  discover(userId: string): Promise<DiscoverPayload> {
    return this.request("POST", "/api/discover", { user_id: userId });
  }

  feed(userId: string, ganimalId: string): Promise<FeedPayload> {
    return this.request("POST", "/api/feed", { user_id: userId, ganimal_id: ganimalId });
  }

  breed(
    userId: string,
    parentA: string,
    parentB: string,
    name?: string,
  ): Promise<GanimalPayload> {
    return this.request("POST", "/api/breed", {
      user_id: userId,
      parent_a: parentA,
      parent_b: parentB,
      name: name ?? null,
    });
  }

  annotate(
    userId: string,
    ganimalId: string,
    morphology?: Record<string, boolean>,
    ratings?: Record<string, number>,
  ): Promise<AnnotatePayload> {
    return this.request("POST", "/api/annotate", {
      user_id: userId,
      ganimal_id: ganimalId,
      morphology: morphology ?? null,
      ratings: ratings ?? null,
    });
  }

  world(userId: string): Promise<WorldPayload> {
    return this.request("GET", `/api/world/${encodeURIComponent(userId)}`);
  }

  leaderboard(userId: string, characteristic: string): Promise<LeaderboardPayload> {
    const qs = new URLSearchParams({ user_id: userId, characteristic });
    return this.request("GET", `/api/leaderboard?${qs}`);
  }

  permalink(ganimalId: string): Promise<GanimalPayload> {
    return this.request("GET", `/g/${encodeURIComponent(ganimalId)}`);
  }

  imageUrl(uri: string): string {
    return this.baseUrl + uri;
  }
}
