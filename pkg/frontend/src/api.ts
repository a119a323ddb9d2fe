import type {
  ActivityEntry,
  ActivitySchema,
  CreateResult,
  MetricDefinition,
  ServiceError,
  SlaDocumentJson,
  StoredSummary,
  ValidationReport,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: ServiceError | ValidationReport,
  ) {
    super(`service responded ${status}`);
  }
}

async function parseOrThrow<T>(response: Response): Promise<T> {
  if (!response.ok) {
    throw new ApiError(response.status, await response.json());
  }
  return response.json() as Promise<T>;
}

/** Thin typed client; every wizard datum originates from these calls. */
export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  async listActivities(): Promise<ActivityEntry[]> {
    return parseOrThrow(await fetch(this.url("/catalog/activities")));
  }

  async activitySchema(name: string): Promise<ActivitySchema> {
    return parseOrThrow(
      await fetch(this.url(`/catalog/activities/${encodeURIComponent(name)}`)),
    );
  }

  async applicationSlos(): Promise<MetricDefinition[]> {
    return parseOrThrow(await fetch(this.url("/catalog/application-slos")));
  }

  async validate(doc: SlaDocumentJson): Promise<ValidationReport> {
    const response = await fetch(this.url("/sla/validate"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(doc),
    });
    return parseOrThrow(response);
  }

  /** Returns the created id, or the 422 report when the document is refused. */
  async create(
    doc: SlaDocumentJson,
  ): Promise<{ created: CreateResult } | { refused: ValidationReport }> {
    const response = await fetch(this.url("/sla"), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(doc),
    });
    if (response.status === 201) {
      return { created: (await response.json()) as CreateResult };
    }
    if (response.status === 422) {
      return { refused: (await response.json()) as ValidationReport };
    }
    throw new ApiError(response.status, await response.json());
  }

  async listStored(): Promise<StoredSummary[]> {
    return parseOrThrow(await fetch(this.url("/slas")));
  }

  async canonicalBytes(id: string): Promise<string> {
    const response = await fetch(this.url(`/slas/${id}`));
    if (!response.ok) {
      throw new ApiError(response.status, await response.json());
    }
    return response.text();
  }
}
