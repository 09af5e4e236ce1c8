import logging

from flask import Flask, jsonify
from flask_cors import CORS

from config import Config
from routes.metrics import metrics_bp


def create_app(config_object=Config):
    """Application factory pattern"""
    app = Flask(__name__)
    app.config.from_object(config_object)
    app.json.sort_keys = app.config.get('JSON_SORT_KEYS', False)
    app.logger.setLevel(app.config.get('GAM_LOG_LEVEL', 'INFO'))
    logging.getLogger('utils').setLevel(app.config.get('GAM_LOG_LEVEL', 'INFO'))

    CORS(app, origins=app.config['GAM_CORS_ORIGINS'], methods=['GET', 'POST', 'OPTIONS'])

    app.register_blueprint(metrics_bp)

    # Health check endpoint
    @app.route('/', methods=['GET'])
    def health_check():
        return jsonify({
            'status': 'healthy',
            'message': 'Metrics service is running',
            'port': app.config['GAM_PORT']
        }), 200

    @app.errorhandler(404)
    def not_found(error):
        return jsonify({
            'success': False,
            'message': 'Endpoint not found'
        }), 404

    @app.errorhandler(405)
    def method_not_allowed(error):
        return jsonify({
            'success': False,
            'message': 'Method not allowed'
        }), 405

    @app.errorhandler(500)
    def internal_error(error):
        return jsonify({
            'success': False,
            'message': 'Internal server error'
        }), 500

    return app


app = create_app()

if __name__ == '__main__':
    logging.basicConfig(level=Config.GAM_LOG_LEVEL)
    app.logger.info('Starting metrics service on port %d', Config.GAM_PORT)
    app.run(host='0.0.0.0', port=Config.GAM_PORT, debug=True)
