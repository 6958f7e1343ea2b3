/**
 * Typed errors mirroring the server's protocol error codes.
 *
 * Every error frame `{type: "error", code, message}` maps to one class so
 * agent code can catch specific failures (e.g. EpisodeOverError) instead of
 * string-matching codes.
 */

export class ProtocolError extends Error {
  readonly code: string;

  constructor(code: string, message: string) {
    super(message);
    this.name = new.target.name;
    this.code = code;
  }
}

export class BadFrameError extends ProtocolError {}
export class BadRequestError extends ProtocolError {}
export class UnknownEnvError extends ProtocolError {}
export class UnsupportedInstructionTypeError extends ProtocolError {}
export class UnsupportedFeedbackTypeError extends ProtocolError {}
export class NoSessionError extends ProtocolError {}
export class NotResetError extends ProtocolError {}
export class EpisodeOverError extends ProtocolError {}
export class InternalServerError extends ProtocolError {}

/** Connection dropped or the server replied with something unreadable. */
export class ConnectionLostError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ConnectionLostError";
  }
}

const ERROR_CLASSES: Record<string, new (code: string, message: string) => ProtocolError> = {
  bad_frame: BadFrameError,
  bad_request: BadRequestError,
  unknown_env: UnknownEnvError,
  unsupported_instruction_type: UnsupportedInstructionTypeError,
  unsupported_feedback_type: UnsupportedFeedbackTypeError,
  no_session: NoSessionError,
  not_reset: NotResetError,
  episode_over: EpisodeOverError,
  internal: InternalServerError,
};

export function errorFromCode(code: string, message: string): ProtocolError {
  const cls = ERROR_CLASSES[code] ?? ProtocolError;
  return new cls(code, message);
}
